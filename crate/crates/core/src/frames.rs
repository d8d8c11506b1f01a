//! Orthonormal frames along curves and discrete rods.
//!
//! Bishop (torsion-free) frames on a curve y(t) solve
//! b_i' = ω × b_i with ω = y' × y'' / |y'|², which does not require unit
//! speed. We integrate that system with classical RK4 on the 3×3 frame matrix,
//! reset the first column to the exact unit tangent after every step and
//! re-orthonormalize. Spline knots are always step boundaries, so each RK4
//! step only sees one polynomial piece.

use std::f64::consts::TAU;
use std::io::Write;

use nalgebra::Matrix3;

use crate::curves::ArcLengthCurve;
use crate::error::{Error, Result};
use crate::rod::DiscreteRod;
use crate::spline::{SplineCurve, TwistFunction};
use crate::Vec3;

/// Speeds below this make the Bishop equation singular.
pub const DEGENERATE_SPEED: f64 = 1e-6;

/// Default RK4 steps per knot interval.
pub const DEFAULT_STEPS_PER_SEGMENT: usize = 8;

/// Rotation matrix whose columns (b₁, b₂, b₃) are the frame axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame(pub Matrix3<f64>);

impl Frame {
    pub fn from_columns(b1: Vec3, b2: Vec3, b3: Vec3) -> Self {
        Frame(Matrix3::from_columns(&[b1, b2, b3]))
    }

    pub fn identity() -> Self {
        Frame(Matrix3::identity())
    }

    /// Deterministic frame with b₁ along `tangent`: b₂ is the coordinate axis
    /// of smallest |component| with its b₁ part removed, b₃ = b₁ × b₂.
    pub fn for_tangent(tangent: &Vec3) -> Result<Self> {
        let n = tangent.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidFrame("tangent must be nonzero".into()));
        }
        let b1 = tangent / n;
        let abs = b1.abs();
        let axis = if abs.x <= abs.y && abs.x <= abs.z {
            Vec3::x()
        } else if abs.y <= abs.z {
            Vec3::y()
        } else {
            Vec3::z()
        };
        let b2 = (axis - b1 * b1.dot(&axis)).normalize();
        Ok(Frame::from_columns(b1, b2, b1.cross(&b2)))
    }

    pub fn b1(&self) -> Vec3 {
        self.0.column(0).into_owned()
    }

    pub fn b2(&self) -> Vec3 {
        self.0.column(1).into_owned()
    }

    pub fn b3(&self) -> Vec3 {
        self.0.column(2).into_owned()
    }

    /// ‖BᵀB − I‖_F.
    pub fn orthonormality_defect(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).norm()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    /// True when ‖BᵀB − I‖_F ≤ 1e-9 and det B > 0.
    pub fn is_rotation(&self) -> bool {
        self.orthonormality_defect() <= 1e-9 && self.determinant() > 0.0
    }

    /// B·Θ^angle: rotates b₂, b₃ about b₁.
    pub fn rotated_about_tangent(&self, angle: f64) -> Self {
        Frame(self.0 * twist_matrix(angle))
    }

    fn reorthonormalized(m: &Matrix3<f64>, tangent: Vec3) -> Self {
        let b1 = tangent.normalize();
        let mut b2: Vec3 = m.column(1).into_owned();
        b2 -= b1 * b1.dot(&b2);
        let b2 = b2.normalize();
        Frame::from_columns(b1, b2, b1.cross(&b2))
    }
}

/// Θ^θ, rotation by θ about the first coordinate axis.
pub fn twist_matrix(angle: f64) -> Matrix3<f64> {
    let (s, c) = angle.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

fn skew(w: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Minimal rotation taking unit vector `a` onto unit vector `b` (a ≠ −b).
fn minimal_rotation(a: &Vec3, b: &Vec3) -> Matrix3<f64> {
    let v = a.cross(b);
    let c = a.dot(b);
    let k = skew(&v);
    Matrix3::identity() + k + k * k / (1.0 + c)
}

/// Discrete Bishop frames on a polygon, one per edge: the first is `initial`,
/// each next one is the previous rotated about e_i × e_{i+1} by the turning
/// angle.
pub fn discrete_parallel_transport(rod: &DiscreteRod, initial: &Frame) -> Result<Vec<Frame>> {
    let e1 = rod.edge(1).normalize();
    if (initial.b1() - e1).norm() > 1e-9 || !initial.is_rotation() {
        return Err(Error::InvalidFrame(
            "initial frame must be a rotation with b1 along the first edge".into(),
        ));
    }
    let n = rod.edge_count();
    let mut frames = Vec::with_capacity(n);
    frames.push(*initial);
    let mut prev_dir = e1;
    for i in 2..=n {
        let dir = rod.edge(i).normalize();
        let r = minimal_rotation(&prev_dir, &dir);
        let last = frames[frames.len() - 1];
        frames.push(Frame::reorthonormalized(&(r * last.0), dir));
        prev_dir = dir;
    }
    Ok(frames)
}

/// A curve that can feed the Bishop equation: smooth between breakpoints.
pub trait TangentSource {
    /// Parameter breakpoints, including both ends, increasing.
    fn breakpoints(&self) -> Vec<f64>;
    /// (y', y'') at `t` using the smooth piece that contains the open interval
    /// (lo, hi).
    fn derivs_on(&self, lo: f64, hi: f64, t: f64) -> (Vec3, Vec3);
}

impl TangentSource for SplineCurve {
    fn breakpoints(&self) -> Vec<f64> {
        self.knots().to_vec()
    }

    fn derivs_on(&self, lo: f64, hi: f64, t: f64) -> (Vec3, Vec3) {
        let piece = self.piece_at(0.5 * (lo + hi));
        let (_, d1, d2) = self.eval_piece(piece, t);
        (d1, d2)
    }
}

/// Adapter for smooth analytic curves, integrated on caller-chosen breakpoints.
pub struct SmoothCurve<'a, C: ArcLengthCurve + ?Sized> {
    pub curve: &'a C,
    pub breaks: Vec<f64>,
}

impl<C: ArcLengthCurve + ?Sized> TangentSource for SmoothCurve<'_, C> {
    fn breakpoints(&self) -> Vec<f64> {
        self.breaks.clone()
    }

    fn derivs_on(&self, _lo: f64, _hi: f64, t: f64) -> (Vec3, Vec3) {
        (self.curve.deriv1(t), self.curve.deriv2(t))
    }
}

/// Frames sampled at increasing parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameField {
    pub ts: Vec<f64>,
    pub frames: Vec<Frame>,
}

impl FrameField {
    pub fn len(&self) -> usize {
        self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ts.is_empty()
    }

    /// Keeps the samples with the given indices.
    pub fn select(&self, indices: &[usize]) -> FrameField {
        FrameField {
            ts: indices.iter().map(|&i| self.ts[i]).collect(),
            frames: indices.iter().map(|&i| self.frames[i]).collect(),
        }
    }

    /// CSV with header `t,b1x,b1y,b1z,b2x,b2y,b2z,b3x,b3y,b3z`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,b1x,b1y,b1z,b2x,b2y,b2z,b3x,b3y,b3z")?;
        for (t, f) in self.ts.iter().zip(&self.frames) {
            let (a, b, c) = (f.b1(), f.b2(), f.b3());
            writeln!(
                out,
                "{t},{},{},{},{},{},{},{},{},{}",
                a.x, a.y, a.z, b.x, b.y, b.z, c.x, c.y, c.z
            )?;
        }
        Ok(())
    }
}

fn check_speed(t: f64, d1: &Vec3) -> Result<f64> {
    let speed = d1.norm();
    if !(speed >= DEGENERATE_SPEED) {
        return Err(Error::DegenerateSpeed { t, speed });
    }
    Ok(speed)
}

/// Integrates the Bishop system over `source`'s breakpoints with `steps` RK4
/// steps per interval. Output samples are every step boundary.
pub fn integrate_bishop_on<S: TangentSource + ?Sized>(
    source: &S,
    initial: &Frame,
    steps: usize,
) -> Result<FrameField> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps per segment must be positive".into()));
    }
    let breaks = source.breakpoints();
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("breakpoints must be strictly increasing".into()));
    }
    if !initial.is_rotation() {
        return Err(Error::InvalidFrame("initial frame is not a rotation".into()));
    }
    let (lo0, hi0) = (breaks[0], breaks[1]);
    let (d1, _) = source.derivs_on(lo0, hi0, lo0);
    check_speed(lo0, &d1)?;
    if (initial.b1() - d1.normalize()).norm() > 1e-9 {
        return Err(Error::InvalidFrame("b1 must equal the unit tangent at the start".into()));
    }

    let omega = |lo: f64, hi: f64, t: f64| -> Result<(Matrix3<f64>, Vec3)> {
        let (d1, d2) = source.derivs_on(lo, hi, t);
        let speed = check_speed(t, &d1)?;
        Ok((skew(&(d1.cross(&d2) / (speed * speed))), d1))
    };

    let mut ts = Vec::with_capacity((breaks.len() - 1) * steps + 1);
    let mut frames = Vec::with_capacity(ts.capacity());
    ts.push(lo0);
    frames.push(*initial);
    let mut b = initial.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let h = (hi - lo) / steps as f64;
        for k in 0..steps {
            let t0 = lo + h * k as f64;
            let t1 = if k + 1 == steps { hi } else { lo + h * (k + 1) as f64 };
            let hh = t1 - t0;
            let tm = t0 + 0.5 * hh;
            let (w0, _) = omega(lo, hi, t0)?;
            let (wm, _) = omega(lo, hi, tm)?;
            let (w1, tangent) = omega(lo, hi, t1)?;
            let k1 = w0 * b;
            let k2 = wm * (b + k1 * (0.5 * hh));
            let k3 = wm * (b + k2 * (0.5 * hh));
            let k4 = w1 * (b + k3 * hh);
            let next = b + (k1 + (k2 + k3) * 2.0 + k4) * (hh / 6.0);
            let frame = Frame::reorthonormalized(&next, tangent);
            b = frame.0;
            ts.push(t1);
            frames.push(frame);
        }
    }
    Ok(FrameField { ts, frames })
}

/// Bishop frame field of a spline, `steps_per_segment` RK4 steps per knot
/// interval (caps included).
pub fn integrate_bishop(spline: &SplineCurve, initial: &Frame, steps_per_segment: usize) -> Result<FrameField> {
    integrate_bishop_on(spline, initial, steps_per_segment)
}

/// Bishop frame field of a spline started from [`Frame::for_tangent`].
pub fn default_bishop(spline: &SplineCurve, steps_per_segment: usize) -> Result<FrameField> {
    let initial = Frame::for_tangent(&spline.deriv1(0.0)?)?;
    integrate_bishop(spline, &initial, steps_per_segment)
}

/// Material frames: each Bishop frame rotated about b₁ by the twist value.
pub fn apply_twist(field: &FrameField, twist: &TwistFunction) -> Result<FrameField> {
    let frames = field
        .ts
        .iter()
        .zip(&field.frames)
        .map(|(&t, f)| Ok(f.rotated_about_tangent(twist.eval(t)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameField { ts: field.ts.clone(), frames })
}

/// min over constant θ̄ of max_k ‖f_k Θ^θ̄ − g_k‖_F.
///
/// Per sample, ‖f Θ^θ − g‖²_F = 6 − 2(M₁₁ + p cos θ + q sin θ) with M = fᵀg,
/// p = M₂₂ + M₃₃ and q = M₃₂ − M₂₃, minimized at θ = atan2(q, p). Those
/// per-sample optima and a uniform grid seed a golden-section refinement of
/// the max over samples, which is evaluated entrywise to avoid cancellation.
pub fn frame_distance_mod_rotation(f: &FrameField, g: &FrameField) -> Result<f64> {
    if f.len() != g.len() || f.ts.iter().zip(&g.ts).any(|(a, b)| (a - b).abs() > 1e-12 * (1.0 + a.abs())) {
        return Err(Error::GridMismatch);
    }
    if f.is_empty() {
        return Ok(0.0);
    }
    let objective = |theta: f64| -> f64 {
        let (s, c) = theta.sin_cos();
        f.frames
            .iter()
            .zip(&g.frames)
            .map(|(a, b)| {
                let (a2, a3) = (a.0.column(1), a.0.column(2));
                (a.0.column(0) - b.0.column(0)).norm_squared()
                    + (a2 * c + a3 * s - b.0.column(1)).norm_squared()
                    + (a3 * c - a2 * s - b.0.column(2)).norm_squared()
            })
            .fold(0.0, f64::max)
            .sqrt()
    };
    let seeds: Vec<f64> = f
        .frames
        .iter()
        .zip(&g.frames)
        .map(|(a, b)| {
            let m = a.0.transpose() * b.0;
            (m[(2, 1)] - m[(1, 2)]).atan2(m[(1, 1)] + m[(2, 2)])
        })
        .collect();

    const GRID: usize = 720;
    let mut best = (f64::INFINITY, 0.0);
    let candidates = (0..GRID)
        .map(|k| TAU * k as f64 / GRID as f64)
        .chain(seeds.iter().copied());
    for theta in candidates {
        let v = objective(theta);
        if v < best.0 {
            best = (v, theta);
        }
    }
    let width = TAU / GRID as f64;
    let (mut a, mut b) = (best.1 - width, best.1 + width);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (objective(c), objective(d));
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    Ok(best.0.min(objective(0.5 * (a + b))))
}
