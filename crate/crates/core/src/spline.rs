//! Assignment of a C¹ piecewise-cubic curve and a piecewise-linear twist
//! function to a framed discrete rod.
//!
//! The curve η^X lives on [0, ℓ(X)]: a straight cap from x₀ to the first edge
//! midpoint, one cubic Hermite piece between consecutive edge midpoints (unit
//! tangents along the edges), and a straight cap to x_N. The public curve is
//! the rescaling y^X(t) = η^X(λ t) on [0, L]. Segments are stored in the τ
//! variable and the λ factors are applied at evaluation time.

use crate::error::{Error, Result};
use crate::rod::{DiscreteRod, FramedDiscreteRod, KnotPartition};
use crate::sum::compensated_sum;
use crate::Vec3;

/// S(τ) = A τ³ + B τ² + C τ + D on [0, T].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicSegment {
    pub cubic: Vec3,
    pub quadratic: Vec3,
    pub linear: Vec3,
    pub constant: Vec3,
    pub span: f64,
}

impl CubicSegment {
    pub fn eval(&self, tau: f64) -> Vec3 {
        ((self.cubic * tau + self.quadratic) * tau + self.linear) * tau + self.constant
    }

    pub fn deriv1(&self, tau: f64) -> Vec3 {
        (self.cubic * (3.0 * tau) + self.quadratic * 2.0) * tau + self.linear
    }

    pub fn deriv2(&self, tau: f64) -> Vec3 {
        self.cubic * (6.0 * tau) + self.quadratic * 2.0
    }

    /// ∫₀ᵀ |S''(τ)|² dτ = 12|A|²T³ + 12(A·B)T² + 4|B|²T.
    pub fn bend_integral(&self) -> f64 {
        let t = self.span;
        12.0 * self.cubic.norm_squared() * t * t * t
            + 12.0 * self.cubic.dot(&self.quadratic) * t * t
            + 4.0 * self.quadratic.norm_squared() * t
    }
}

/// Cubic through the midpoints of the edges (x_prev, x_mid) and (x_mid, x_next)
/// with end derivatives σ₀·(unit first edge) and σ₁·(unit second edge) at τ = 0
/// and τ = T.
pub fn fit_cubic(
    x_prev: &Vec3,
    x_mid: &Vec3,
    x_next: &Vec3,
    sigma0: f64,
    sigma1: f64,
    span: f64,
) -> Result<CubicSegment> {
    if !(span.is_finite() && span > 0.0) {
        return Err(Error::InvalidParameter(format!("segment span must be positive, got {span}")));
    }
    let e0 = x_mid - x_prev;
    let e1 = x_next - x_mid;
    let (r0, r1) = (e0.norm(), e1.norm());
    if r0 == 0.0 {
        return Err(Error::DegenerateEdge { index: 0 });
    }
    if r1 == 0.0 {
        return Err(Error::DegenerateEdge { index: 1 });
    }
    let t = span;
    let k0 = sigma0 * t / r0;
    let k1 = sigma1 * t / r1;
    // B T² and A T³ written against the three points.
    let bt2 = x_next * (1.5 - k1) + x_mid * (k1 - 2.0 * k0) + x_prev * (2.0 * k0 - 1.5);
    let at3 = x_next * (k1 - 1.0) + x_mid * (k0 - k1) + x_prev * (1.0 - k0);
    Ok(CubicSegment {
        cubic: at3 / (t * t * t),
        quadratic: bt2 / (t * t),
        linear: e0 * (sigma0 / r0),
        constant: (x_prev + x_mid) * 0.5,
        span: t,
    })
}

/// Which polynomial piece of the spline a parameter falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Piece {
    /// Straight part before the first interior knot.
    LeadingCap,
    /// Cubic between knots i and i+1 (1 ≤ i ≤ N−1).
    Segment(usize),
    /// Straight part after the last interior knot.
    TrailingCap,
}

/// The spline y^X on [0, L].
#[derive(Debug, Clone)]
pub struct SplineCurve {
    partition: KnotPartition,
    segments: Vec<CubicSegment>,
    start: Vec3,
    start_dir: Vec3,
    end: Vec3,
    end_dir: Vec3,
}

/// Assigns the spline y^X to a rod for reference length L (σ₀ = σ₁ = 1).
pub fn build_spline(rod: &DiscreteRod, length: f64) -> Result<SplineCurve> {
    let partition = rod.partition(length)?;
    let pts = rod.points();
    let n = rod.edge_count();
    let mut segments = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let span = partition.taus[i + 1] - partition.taus[i];
        segments.push(fit_cubic(&pts[i - 1], &pts[i], &pts[i + 1], 1.0, 1.0, span)?);
    }
    Ok(SplineCurve {
        segments,
        start: pts[0],
        start_dir: (pts[1] - pts[0]).normalize(),
        end: pts[n],
        end_dir: (pts[n] - pts[n - 1]).normalize(),
        partition,
    })
}

impl SplineCurve {
    pub fn partition(&self) -> &KnotPartition {
        &self.partition
    }

    pub fn segments(&self) -> &[CubicSegment] {
        &self.segments
    }

    pub fn lambda(&self) -> f64 {
        self.partition.lambda
    }

    pub fn length(&self) -> f64 {
        self.partition.reference_length
    }

    /// Knots t₀ … t_{N+1} on [0, L].
    pub fn knots(&self) -> &[f64] {
        &self.partition.ts
    }

    fn check_domain(&self, t: f64) -> Result<f64> {
        let l = self.length();
        let slack = 1e-12 * l;
        if !(t >= -slack && t <= l + slack) {
            return Err(Error::OutOfDomain { t, lo: 0.0, hi: l });
        }
        Ok(t.clamp(0.0, l))
    }

    /// Piece containing t, taking the right-hand piece at a knot.
    pub fn piece_at(&self, t: f64) -> Piece {
        let tau = self.partition.lambda * t;
        let taus = &self.partition.taus;
        let n = self.partition.edge_count();
        let idx = taus.partition_point(|&k| k <= tau);
        // idx = number of knots ≤ τ, so τ ∈ [τ_{idx−1}, τ_idx).
        if idx <= 1 {
            Piece::LeadingCap
        } else if idx > n {
            Piece::TrailingCap
        } else {
            Piece::Segment(idx - 1)
        }
    }

    /// Value and first two t-derivatives of the given piece's polynomial at t
    /// (the piece is extended beyond its interval if t lies outside it).
    pub fn eval_piece(&self, piece: Piece, t: f64) -> (Vec3, Vec3, Vec3) {
        let lambda = self.partition.lambda;
        let tau = lambda * t;
        match piece {
            Piece::LeadingCap => (self.start + self.start_dir * tau, self.start_dir * lambda, Vec3::zeros()),
            Piece::TrailingCap => (
                self.end - self.end_dir * (self.partition.total_length - tau),
                self.end_dir * lambda,
                Vec3::zeros(),
            ),
            Piece::Segment(i) => {
                let seg = &self.segments[i - 1];
                let local = tau - self.partition.taus[i];
                (seg.eval(local), seg.deriv1(local) * lambda, seg.deriv2(local) * (lambda * lambda))
            }
        }
    }

    pub fn eval(&self, t: f64) -> Result<Vec3> {
        let t = self.check_domain(t)?;
        Ok(self.eval_piece(self.piece_at(t), t).0)
    }

    pub fn deriv1(&self, t: f64) -> Result<Vec3> {
        let t = self.check_domain(t)?;
        Ok(self.eval_piece(self.piece_at(t), t).1)
    }

    /// Second derivative; at a knot the right-hand limit.
    pub fn deriv2(&self, t: f64) -> Result<Vec3> {
        let t = self.check_domain(t)?;
        Ok(self.eval_piece(self.piece_at(t), t).2)
    }

    /// ∫₀ᴸ |y''(t)|² dt = λ³ Σ ∫|S_i''|² dτ, in closed form.
    pub fn bend_energy(&self) -> f64 {
        let lambda = self.partition.lambda;
        lambda.powi(3) * compensated_sum(self.segments.iter().map(CubicSegment::bend_integral))
    }

    /// Uniform samples (t, y, y', y'') at `count` ≥ 2 points of [0, L].
    pub fn sample(&self, count: usize) -> Vec<SplineSample> {
        let count = count.max(2);
        let l = self.length();
        (0..count)
            .map(|k| {
                let t = if k + 1 == count { l } else { l * k as f64 / (count - 1) as f64 };
                let (y, d1, d2) = self.eval_piece(self.piece_at(t), t);
                SplineSample { t, point: y, deriv1: d1, deriv2: d2 }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplineSample {
    pub t: f64,
    pub point: Vec3,
    pub deriv1: Vec3,
    pub deriv2: Vec3,
}

/// Piecewise-linear twist z^{X,Φ} on [0, L]: constant φ₁ before t₁, constant
/// φ_N after t_N, linear between consecutive knots.
#[derive(Debug, Clone)]
pub struct TwistFunction {
    partition: KnotPartition,
    values: Vec<f64>,
}

pub fn build_twist(framed: &FramedDiscreteRod, length: f64) -> Result<TwistFunction> {
    Ok(TwistFunction {
        partition: framed.rod().partition(length)?,
        values: framed.angles().to_vec(),
    })
}

impl TwistFunction {
    /// Interior knots t₁ … t_N.
    pub fn knots(&self) -> &[f64] {
        let n = self.values.len();
        &self.partition.ts[1..=n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn length(&self) -> f64 {
        self.partition.reference_length
    }

    fn interval(&self, t: f64) -> Option<usize> {
        let tau = self.partition.lambda * t;
        let taus = &self.partition.taus;
        let n = self.values.len();
        let idx = taus.partition_point(|&k| k <= tau);
        if idx <= 1 || idx > n {
            None
        } else {
            Some(idx - 1)
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let l = self.length();
        if !(t >= -1e-12 * l && t <= l * (1.0 + 1e-12)) {
            return Err(Error::OutOfDomain { t, lo: 0.0, hi: l });
        }
        let taus = &self.partition.taus;
        let tau = self.partition.lambda * t;
        let n = self.values.len();
        Ok(match self.interval(t) {
            Some(i) => {
                let (p0, p1) = (self.values[i - 1], self.values[i]);
                p0 + (p1 - p0) * (tau - taus[i]) / (taus[i + 1] - taus[i])
            }
            None if tau < taus[1] => self.values[0],
            None => self.values[n - 1],
        })
    }

    /// z'(t); at a knot the right-hand slope.
    pub fn deriv(&self, t: f64) -> Result<f64> {
        let l = self.length();
        if !(t >= -1e-12 * l && t <= l * (1.0 + 1e-12)) {
            return Err(Error::OutOfDomain { t, lo: 0.0, hi: l });
        }
        Ok(self.interval(t).map_or(0.0, |i| self.slope(i)))
    }

    /// dz/dt on [t_i, t_{i+1}], 1 ≤ i ≤ N−1.
    pub fn slope(&self, i: usize) -> f64 {
        let taus = &self.partition.taus;
        self.partition.lambda * (self.values[i] - self.values[i - 1]) / (taus[i + 1] - taus[i])
    }

    /// ∫₀ᴸ |z'|² dt = λ Σ (φ_{i+1} − φ_i)² / (τ_{i+1} − τ_i).
    pub fn tor_energy(&self) -> f64 {
        let taus = &self.partition.taus;
        let n = self.values.len();
        self.partition.lambda
            * compensated_sum((1..n).map(|i| {
                let d = self.values[i] - self.values[i - 1];
                d * d / (taus[i + 1] - taus[i])
            }))
    }
}
