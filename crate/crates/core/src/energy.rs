//! Bending, torsion and penalty energies of framed discrete rods.
//!
//! Spline energies are evaluated in the τ variable with explicit powers of λ:
//! ∫|y''|² dt = λ³ Σ Bend and ∫|z'|² dt = λ Σ Tor, where Bend and Tor only
//! depend on two neighbouring edges.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rod::{DiscreteRod, FramedDiscreteRod};
use crate::spline::{build_spline, build_twist};
use crate::sum::compensated_sum;
use crate::Vec3;

/// Soft penalty N^α|λ−1| + N^β max edge, or the 0/∞ indicator of
/// {|λ−1| < N^{−α}, max edge ≤ N^{−β}}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PenaltyMode {
    #[default]
    Soft,
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyParams {
    pub alpha: f64,
    pub beta: f64,
    pub mode: PenaltyMode,
}

impl Default for PenaltyParams {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 0.5, mode: PenaltyMode::Soft }
    }
}

impl PenaltyParams {
    /// Soft penalty with 0 < α < 2 and 0 < β < 1.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Self { alpha, beta, mode: PenaltyMode::Soft }.validated()
    }

    pub fn with_mode(self, mode: PenaltyMode) -> Self {
        Self { mode, ..self }
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.alpha > 0.0 && self.alpha < 2.0) {
            return Err(Error::InvalidParameter(format!("alpha must lie in (0, 2), got {}", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::InvalidParameter(format!("beta must lie in (0, 1), got {}", self.beta)));
        }
        Ok(self)
    }
}

/// Stiffnesses EJ and GJ₁; the energy uses EJ/2 and GJ₁/2 as prefactors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub bend_coefficient: f64,
    pub twist_coefficient: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self { bend_coefficient: 2.0, twist_coefficient: 2.0 }
    }
}

impl MaterialParams {
    pub fn new(bend_coefficient: f64, twist_coefficient: f64) -> Result<Self> {
        for (name, v) in [("EJ", bend_coefficient), ("GJ1", twist_coefficient)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { bend_coefficient, twist_coefficient })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub lambda: f64,
    pub max_edge: f64,
    pub bend: f64,
    pub tor: f64,
    pub pen: f64,
    pub total: f64,
}

fn edge_lengths(x_prev: &Vec3, x_mid: &Vec3, x_next: &Vec3) -> Result<(Vec3, Vec3, f64, f64)> {
    let e0 = x_mid - x_prev;
    let e1 = x_next - x_mid;
    let (r0, r1) = (e0.norm(), e1.norm());
    if !(r0 > 0.0) {
        return Err(Error::DegenerateEdge { index: 0 });
    }
    if !(r1 > 0.0) {
        return Err(Error::DegenerateEdge { index: 1 });
    }
    Ok((e0, e1, r0, r1))
}

/// Bend = 2 sin²(φ/2)(r₁³ + r₀³)/((r₀ + r₁)/2)⁴, φ the turning angle at x_mid.
pub fn bend_local(x_prev: &Vec3, x_mid: &Vec3, x_next: &Vec3) -> Result<f64> {
    let (e0, e1, r0, r1) = edge_lengths(x_prev, x_mid, x_next)?;
    // 2 sin²(φ/2) = 1 − cos φ = |u₁ − u₀|²/2, stable for small angles.
    let two_sin2 = 0.5 * (e1 / r1 - e0 / r0).norm_squared();
    let half_sum = 0.5 * (r0 + r1);
    Ok(two_sin2 * (r1.powi(3) + r0.powi(3)) / half_sum.powi(4))
}

/// Tor = (φ₁ − φ₀)²/((r₀ + r₁)/2).
pub fn tor_local(x_prev: &Vec3, x_mid: &Vec3, x_next: &Vec3, phi0: f64, phi1: f64) -> Result<f64> {
    let (_, _, r0, r1) = edge_lengths(x_prev, x_mid, x_next)?;
    let d = phi1 - phi0;
    Ok(d * d / (0.5 * (r0 + r1)))
}

/// Σ over interior vertices of Bend.
pub fn bend_local_sum(rod: &DiscreteRod) -> Result<f64> {
    let p = rod.points();
    let terms = (1..rod.edge_count())
        .map(|i| bend_local(&p[i - 1], &p[i], &p[i + 1]))
        .collect::<Result<Vec<_>>>()?;
    Ok(compensated_sum(terms))
}

/// Σ over interior vertices of Tor, pairing the angles of the two edges that
/// meet at the vertex.
pub fn tor_local_sum(framed: &FramedDiscreteRod) -> Result<f64> {
    let p = framed.rod().points();
    let phi = framed.angles();
    let terms = (1..framed.rod().edge_count())
        .map(|i| tor_local(&p[i - 1], &p[i], &p[i + 1], phi[i - 1], phi[i]))
        .collect::<Result<Vec<_>>>()?;
    Ok(compensated_sum(terms))
}

/// ∫₀ᴸ |y''|² dt for the rod's spline, in closed form.
pub fn bend_energy_spline(rod: &DiscreteRod, length: f64) -> Result<f64> {
    Ok(build_spline(rod, length)?.bend_energy())
}

/// ∫₀ᴸ |z'|² dt for the rod's twist function.
pub fn tor_energy(framed: &FramedDiscreteRod, length: f64) -> Result<f64> {
    Ok(build_twist(framed, length)?.tor_energy())
}

fn check_count(rod: &DiscreteRod, n: usize) -> Result<()> {
    if n != rod.edge_count() {
        return Err(Error::InvalidParameter(format!(
            "N = {n} does not match the rod's {} edges",
            rod.edge_count()
        )));
    }
    Ok(())
}

fn penalty_from(lambda: f64, max_edge: f64, n: usize, params: &PenaltyParams) -> f64 {
    let nf = n as f64;
    match params.mode {
        PenaltyMode::Soft => nf.powf(params.alpha) * (lambda - 1.0).abs() + nf.powf(params.beta) * max_edge,
        PenaltyMode::Hard => {
            if (lambda - 1.0).abs() < nf.powf(-params.alpha) && max_edge <= nf.powf(-params.beta) {
                0.0
            } else {
                f64::INFINITY
            }
        }
    }
}

/// Penalty term for a rod of `n` edges and reference length `length`.
pub fn penalty(rod: &DiscreteRod, n: usize, length: f64, params: &PenaltyParams) -> Result<f64> {
    check_count(rod, n)?;
    params.validated()?;
    let lambda = rod.partition(length)?.lambda;
    Ok(penalty_from(lambda, rod.max_edge(), n, params))
}

/// Full discrete energy with material prefactors EJ/2 and GJ₁/2.
pub fn total_energy(
    framed: &FramedDiscreteRod,
    n: usize,
    length: f64,
    pen: &PenaltyParams,
    mat: &MaterialParams,
) -> Result<EnergyReport> {
    let rod = framed.rod();
    check_count(rod, n)?;
    pen.validated()?;
    let mat = MaterialParams::new(mat.bend_coefficient, mat.twist_coefficient)?;
    let spline = build_spline(rod, length)?;
    let lambda = spline.lambda();
    let max_edge = rod.max_edge();
    let bend = 0.5 * mat.bend_coefficient * spline.bend_energy();
    let tor = 0.5 * mat.twist_coefficient * tor_energy(framed, length)?;
    let pen = penalty_from(lambda, max_edge, n, pen);
    Ok(EnergyReport { n, lambda, max_edge, bend, tor, pen, total: bend + tor + pen })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use nalgebra::Rotation3;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn v(x: f64, y: f64, z: f64) -> Vec3 {
        Vec3::new(x, y, z)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / (1.0 + b.abs())
    }

    fn random_rod(rng: &mut impl Rng, n: usize) -> DiscreteRod {
        loop {
            let pts: Vec<Vec3> = (0..=n)
                .map(|_| v(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            if let Ok(rod) = DiscreteRod::new(pts) {
                return rod;
            }
        }
    }

    fn spline_quadrature(rod: &DiscreteRod, length: f64) -> f64 {
        let y = build_spline(rod, length).unwrap();
        let rule = GaussLegendre::new(32);
        let knots = y.knots();
        let lambda = y.lambda();
        let mut acc = 0.0;
        for (k, seg) in y.segments().iter().enumerate() {
            let (a, b) = (knots[k + 1], knots[k + 2]);
            let t0 = y.partition().taus[k + 1];
            acc += rule.integrate(|t| (seg.deriv2(lambda * t - t0) * lambda * lambda).norm_squared(), a, b);
        }
        acc
    }

    #[test]
    fn bend_local_examples() {
        let o = Vec3::zeros();
        assert_eq!(bend_local(&o, &v(1.0, 0.0, 0.0), &v(3.0, 0.0, 0.0)).unwrap(), 0.0);
        let b = bend_local(&o, &v(1.0, 0.0, 0.0), &v(1.0, 1.0, 0.0)).unwrap();
        assert!((b - 2.0).abs() < 1e-15);
        // Oracle: quadrature of |S''|² over the single cubic piece.
        let rod = DiscreteRod::from_arrays(&[[0.0; 3], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]).unwrap();
        let seg = build_spline(&rod, 2.0).unwrap().segments()[0];
        let q = GaussLegendre::new(8).integrate(|t| seg.deriv2(t).norm_squared(), 0.0, seg.span);
        assert!((q - 2.0).abs() < 1e-13);
        // Equal chords: 4/r sin²(φ/2), degree −1 in r.
        let angle = 0.7f64;
        let tri = |r: f64| bend_local(&v(-r, 0.0, 0.0), &o, &v(r * angle.cos(), r * angle.sin(), 0.0)).unwrap();
        assert!((tri(1.0) - 4.0 * (angle / 2.0).sin().powi(2)).abs() < 1e-14);
        assert!((tri(0.5) - 2.0 * tri(1.0)).abs() < 1e-14);
        assert!(matches!(bend_local(&o, &o, &v(1.0, 0.0, 0.0)), Err(Error::DegenerateEdge { index: 0 })));
    }

    #[test]
    fn tor_local_examples() {
        let (a, b, c) = (Vec3::zeros(), v(1.0, 0.0, 0.0), v(2.0, 0.0, 0.0));
        assert_eq!(tor_local(&a, &b, &c, 0.4, 0.4).unwrap(), 0.0);
        assert_eq!(tor_local(&a, &b, &c, 0.0, 1.0).unwrap(), 1.0);
        assert_eq!(tor_local(&a, &b, &c, 0.0, 2.0).unwrap(), 4.0);
        assert!(tor_local(&a, &a, &c, 0.0, 1.0).is_err());
    }

    #[test]
    fn bend_energy_examples() {
        let line = DiscreteRod::from_arrays(&[[0.0; 3], [0.5, 0.0, 0.0], [1.5, 0.0, 0.0], [2.0, 0.0, 0.0]]).unwrap();
        assert_eq!(bend_energy_spline(&line, 2.0).unwrap(), 0.0);
        let spacing = crate::spline::tests::spacing_rod(7);
        assert!((bend_energy_spline(&spacing, 3.0).unwrap() - 2.0).abs() < 1e-13);
        // Square inscribed in the unit circle, open chain of four edges.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let sq = DiscreteRod::from_arrays(&[[s, 0.0, 0.0], [0.0, s, 0.0], [-s, 0.0, 0.0], [0.0, -s, 0.0], [s, 0.0, 0.0]]);
        let sq = sq.unwrap();
        let l = sq.total_length() * 1.1;
        let lambda = sq.total_length() / l;
        let local = 3.0 * bend_local(&sq.points()[0], &sq.points()[1], &sq.points()[2]).unwrap();
        let e = bend_energy_spline(&sq, l).unwrap();
        assert!(rel(e, lambda.powi(3) * local) < 1e-14);
        assert!(rel(e, spline_quadrature(&sq, l)) < 1e-12);
    }

    #[test]
    fn tor_energy_examples() {
        let rod = DiscreteRod::from_arrays(&[[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]).unwrap();
        let constant = FramedDiscreteRod::new(rod.clone(), vec![0.3, 0.3]).unwrap();
        assert_eq!(tor_energy(&constant, 2.0).unwrap(), 0.0);
        let framed = FramedDiscreteRod::new(rod, vec![0.0, 1.0]).unwrap();
        let e = tor_energy(&framed, 2.0).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
        let z = build_twist(&framed, 2.0).unwrap();
        let q = GaussLegendre::new(4).integrate(|t| z.deriv(t).unwrap().powi(2), 0.5, 1.5);
        assert!((q - e).abs() < 1e-14);
    }

    #[test]
    fn penalty_examples() {
        let p = PenaltyParams::default();
        let n = 16usize;
        let l = 2.0;
        let pts: Vec<Vec3> = (0..=n).map(|i| v(l * i as f64 / n as f64, 0.0, 0.0)).collect();
        let rod = DiscreteRod::new(pts).unwrap();
        let pen = penalty(&rod, n, l, &p).unwrap();
        assert!((pen - l * (n as f64).powf(-0.5)).abs() < 1e-12);
        let spacing = crate::spline::tests::spacing_rod(9);
        assert!((penalty(&spacing, 9, 3.0, &p).unwrap() - 3.0).abs() < 1e-12);
        // λ = 1 + N⁻², max edge L/N.
        let stretch = 1.0 + 1.0 / (n * n) as f64;
        let pts: Vec<Vec3> = (0..=n).map(|i| v(l * stretch * i as f64 / n as f64, 0.0, 0.0)).collect();
        let rod = DiscreteRod::new(pts).unwrap();
        let expect = 1.0 / n as f64 + l * stretch * (n as f64).powf(-0.5);
        assert!((penalty(&rod, n, l, &p).unwrap() - expect).abs() < 1e-12);
        assert!(penalty(&rod, n + 1, l, &p).is_err());
    }

    #[test]
    fn hard_penalty_is_an_indicator() {
        let hard = PenaltyParams::default().with_mode(PenaltyMode::Hard);
        let n = 16;
        let l = 1.0;
        let pts: Vec<Vec3> = (0..=n).map(|i| v(i as f64 / n as f64, 0.0, 0.0)).collect();
        let rod = DiscreteRod::new(pts).unwrap();
        assert_eq!(penalty(&rod, n, l, &hard).unwrap(), 0.0);
        assert_eq!(penalty(&rod, n, 0.5, &hard).unwrap(), f64::INFINITY);
    }

    #[test]
    fn parameter_validation() {
        assert!(PenaltyParams::new(1.0, 0.5).is_ok());
        for (a, b) in [(0.0, 0.5), (2.0, 0.5), (1.0, 0.0), (1.0, 1.0), (f64::NAN, 0.5)] {
            assert!(PenaltyParams::new(a, b).is_err());
        }
        assert!(MaterialParams::new(0.0, 1.0).is_err());
        assert!(MaterialParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn total_energy_examples() {
        let n = 8;
        let pts: Vec<Vec3> = (0..=n).map(|i| v(0.0, 0.0, i as f64 / 4.0)).collect();
        let framed = FramedDiscreteRod::new(DiscreteRod::new(pts).unwrap(), vec![1.2; n]).unwrap();
        let r = total_energy(&framed, n, 2.0, &PenaltyParams::default(), &MaterialParams::default()).unwrap();
        assert_eq!(r.bend, 0.0);
        assert_eq!(r.tor, 0.0);
        assert_eq!(r.total, r.pen);

        let spacing = FramedDiscreteRod::untwisted(crate::spline::tests::spacing_rod(6));
        let r = total_energy(&spacing, 6, 3.0, &PenaltyParams::default(), &MaterialParams::default()).unwrap();
        assert!((r.lambda - 1.0).abs() < 1e-15);
        assert!((r.bend - 2.0).abs() < 1e-13);
        assert_eq!(r.tor, 0.0);
        assert!((r.pen - 6f64.sqrt()).abs() < 1e-13);

        let mat = MaterialParams::new(4.0, 1.0).unwrap();
        let r2 = total_energy(&spacing, 6, 3.0, &PenaltyParams::default(), &mat).unwrap();
        assert!((r2.bend - 2.0 * r.bend).abs() < 1e-13);
    }

    #[test]
    fn report_json_field_names() {
        let r = EnergyReport { n: 3, lambda: 1.0, max_edge: 0.5, bend: 1.0, tor: 2.0, pen: 0.5, total: 3.5 };
        let json = serde_json::to_value(r).unwrap();
        for key in ["N", "lambda", "max_edge", "bend", "tor", "pen", "total"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        let back: EnergyReport = serde_json::from_value(json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn local_identities_on_random_rods() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        for _ in 0..200 {
            let n = rng.gen_range(3..=50);
            let rod = random_rod(&mut rng, n);
            let l = rod.total_length() * rng.gen_range(0.7..1.3);
            let lambda = rod.partition(l).unwrap().lambda;
            let bend = bend_energy_spline(&rod, l).unwrap();
            let local = bend_local_sum(&rod).unwrap();
            assert!((bend - lambda.powi(3) * local).abs() <= 1e-12 * (1.0 + bend));
            assert!(rel(bend, spline_quadrature(&rod, l)) < 1e-9);

            let angles: Vec<f64> = (0..n).map(|_| rng.gen_range(-PI..PI)).collect();
            let framed = FramedDiscreteRod::new(rod, angles).unwrap();
            let tor = tor_energy(&framed, l).unwrap();
            let local = tor_local_sum(&framed).unwrap();
            assert!((tor - lambda * local).abs() <= 1e-12 * (1.0 + tor));
        }
    }

    #[test]
    fn scalar_product_lemmas() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for _ in 0..500 {
            let rod = random_rod(&mut rng, 2);
            let p = rod.points();
            let (r0, r1) = (rod.edge(1).norm(), rod.edge(2).norm());
            let half = rod.edge_angles()[0] / 2.0;
            let s2 = half.sin().powi(2);
            let seg = crate::spline::fit_cubic(&p[0], &p[1], &p[2], 1.0, 1.0, 0.5 * (r0 + r1)).unwrap();
            let t = seg.span;
            let a2 = seg.cubic.norm_squared() * t.powi(6);
            let ab = seg.cubic.dot(&seg.quadratic) * t.powi(5);
            let b2 = seg.quadratic.norm_squared() * t.powi(4);
            assert!((a2 - s2 * (r1 - r0).powi(2)).abs() < 1e-10);
            assert!((ab - 2.0 * s2 * (r0 - r1) * (r1 - r0 / 2.0)).abs() < 1e-10);
            assert!((b2 - 4.0 * s2 * (r1 - r0 / 2.0).powi(2)).abs() < 1e-10);
        }
    }

    #[test]
    fn speed_defect_bounded_by_bending() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(99);
        for _ in 0..50 {
            let n = rng.gen_range(3..=20);
            let rod = random_rod(&mut rng, n);
            let l = rod.total_length() * rng.gen_range(0.5..2.0);
            let y = build_spline(&rod, l).unwrap();
            let lambda = y.lambda();
            let bound = y.bend_energy().sqrt() * lambda.powf(-0.5) * rod.max_edge().sqrt();
            let worst = y
                .sample(4001)
                .iter()
                .map(|s| (s.deriv1.norm() - lambda).abs())
                .fold(0.0, f64::max);
            assert!(worst <= bound + 1e-10, "{worst} > {bound}");
        }
    }

    proptest! {
        #[test]
        fn energies_invariant_under_rigid_motion(
            seed in any::<u64>(),
            axis in prop::array::uniform3(-1.0f64..1.0),
            angle in -PI..PI,
            shift in prop::array::uniform3(-5.0f64..5.0),
        ) {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let n = rng.gen_range(3..12);
            let rod = random_rod(&mut rng, n);
            let angles: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let axis = Vec3::from(axis);
            prop_assume!(axis.norm() > 1e-3);
            let rot = Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle);
            let moved: Vec<Vec3> = rod.points().iter().map(|p| rot * p + Vec3::from(shift)).collect();
            let Ok(moved) = DiscreteRod::new(moved) else { return Ok(()) };
            let l = rod.total_length();
            let a = total_energy(&FramedDiscreteRod::new(rod, angles.clone()).unwrap(), n, l, &PenaltyParams::default(), &MaterialParams::default()).unwrap();
            let b = total_energy(&FramedDiscreteRod::new(moved, angles).unwrap(), n, l, &PenaltyParams::default(), &MaterialParams::default()).unwrap();
            prop_assert!(rel(a.bend, b.bend) < 1e-12 * (1.0 + a.bend));
            prop_assert!(rel(a.tor, b.tor) < 1e-12);
            prop_assert!(rel(a.pen, b.pen) < 1e-12);
        }

        #[test]
        fn report_total_is_sum(seed in any::<u64>()) {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let n = rng.gen_range(2..20);
            let rod = random_rod(&mut rng, n);
            let angles: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let l = rng.gen_range(0.5..5.0);
            let r = total_energy(&FramedDiscreteRod::new(rod, angles).unwrap(), n, l, &PenaltyParams::default(), &MaterialParams::default()).unwrap();
            prop_assert!((r.total - (r.bend + r.tor + r.pen)).abs() <= 1e-12 * r.total.abs());
            prop_assert!(r.bend >= 0.0 && r.tor >= 0.0 && r.pen > 0.0);
        }
    }
}
