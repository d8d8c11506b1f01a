//! Convergence sweeps, the spacing counterexample and frame studies.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::curves::{ArcLengthCurve, TwistProfile};
use crate::discretize::{recovery_rod, solve_r_n};
use crate::energy::{total_energy, EnergyReport, MaterialParams, PenaltyParams};
use crate::error::{Error, Result};
use crate::frames::{
    default_bishop, frame_distance_mod_rotation, integrate_bishop_on, Frame, FrameField, SmoothCurve,
    DEFAULT_STEPS_PER_SEGMENT,
};
use crate::rod::{DiscreteRod, FramedDiscreteRod};
use crate::spline::{build_spline, SplineCurve};
use crate::Vec3;

/// Default sweep.
pub const DEFAULT_N_LIST: [usize; 6] = [8, 16, 32, 64, 128, 256];

pub const TABLE_CSV_HEADER: &str = "N,r_N,lambda_N,bend,tor,pen,total,bend_err,tor_err,frame_dist";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    #[serde(rename = "N")]
    pub n: usize,
    pub r_n: f64,
    pub lambda: f64,
    pub bend: f64,
    pub tor: f64,
    pub pen: f64,
    pub total: f64,
    pub bend_err: f64,
    pub tor_err: f64,
    pub frame_dist: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Continuum bending and twist energies, with material prefactors.
    pub continuum_bend: f64,
    pub continuum_tor: f64,
}

impl ConvergenceTable {
    pub fn continuum_total(&self) -> f64 {
        self.continuum_bend + self.continuum_tor
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{TABLE_CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.n, r.r_n, r.lambda, r.bend, r.tor, r.pen, r.total, r.bend_err, r.tor_err, r.frame_dist
            )?;
        }
        Ok(())
    }
}

/// Bishop field of the rod's spline and the curve's own Bishop field on the
/// same knots and steps, both sampled at the middle of every knot interval.
pub fn bishop_pair<C: ArcLengthCurve + ?Sized>(
    curve: &C,
    spline: &SplineCurve,
    steps: usize,
) -> Result<(FrameField, FrameField)> {
    let discrete = default_bishop(spline, steps)?;
    let smooth = SmoothCurve { curve, breaks: spline.knots().to_vec() };
    let continuum = integrate_bishop_on(&smooth, &Frame::for_tangent(&curve.deriv1(0.0))?, steps)?;
    let pieces = spline.knots().len() - 1;
    let mid: Vec<usize> = (0..pieces).map(|k| k * steps + steps / 2).collect();
    Ok((discrete.select(&mid), continuum.select(&mid)))
}

fn frame_distance_for<C: ArcLengthCurve + ?Sized>(curve: &C, rod: &DiscreteRod, steps: usize) -> Result<f64> {
    let spline = build_spline(rod, curve.length())?;
    let (f, g) = bishop_pair(curve, &spline, steps)?;
    frame_distance_mod_rotation(&f, &g)
}

fn sorted_unique(n_list: &[usize]) -> Vec<usize> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    ns
}

/// Recovery-rod energies over a sweep of N, with absolute errors against the
/// continuum energies. Each N runs as an independent job.
pub fn converge<C: ArcLengthCurve + ?Sized>(
    curve: &C,
    twist: &TwistProfile,
    n_list: &[usize],
    pen: &PenaltyParams,
    mat: &MaterialParams,
) -> Result<ConvergenceTable> {
    let pen = pen.validated()?;
    let mat = MaterialParams::new(mat.bend_coefficient, mat.twist_coefficient)?;
    let l = curve.length();
    let continuum_bend = 0.5 * mat.bend_coefficient * curve.bend_energy();
    let continuum_tor = 0.5 * mat.twist_coefficient * twist.tor_energy(l);
    let rows = sorted_unique(n_list)
        .par_iter()
        .map(|&n| {
            let framed = recovery_rod(curve, twist, n)?;
            let report = total_energy(&framed, n, l, &pen, &mat)?;
            let frame_dist = frame_distance_for(curve, framed.rod(), DEFAULT_STEPS_PER_SEGMENT)?;
            Ok(ConvergenceRow {
                n,
                r_n: framed.rod().chord_lengths()[0],
                lambda: report.lambda,
                bend: report.bend,
                tor: report.tor,
                pen: report.pen,
                total: report.total,
                bend_err: (report.bend - continuum_bend).abs(),
                tor_err: (report.tor - continuum_tor).abs(),
                frame_dist,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { rows, continuum_bend, continuum_tor })
}

/// (L/N) Σ_{i=1}^{N−1} |(u((i−1)h) + u((i+1)h) − 2u(ih))/h²|², h = L/N.
pub fn riemann_bend<C: ArcLengthCurve + ?Sized>(curve: &C, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::TooFewPoints { min: 3, got: n });
    }
    let h = curve.length() / n as f64;
    let u = |i: usize| curve.eval(h * i as f64);
    Ok(h * crate::sum::compensated_sum(
        (1..n).map(|i| ((u(i - 1) + u(i + 1) - u(i) * 2.0) / (h * h)).norm_squared()),
    ))
}

/// (L/N) Σ_{i=1}^{N−1} |(θ((i+½)h) − θ((i−½)h))/h|², h = L/N.
pub fn riemann_tor(twist: &TwistProfile, length: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::TooFewPoints { min: 3, got: n });
    }
    let h = length / n as f64;
    let theta = |x: f64| twist.eval(x * h);
    Ok(h * crate::sum::compensated_sum((1..n).map(|i| {
        let d = (theta(i as f64 + 0.5) - theta(i as f64 - 0.5)) / h;
        d * d
    })))
}

/// Reference length of the spacing counterexample.
pub const COUNTEREXAMPLE_LENGTH: f64 = 3.0;

/// Planar rod x₀ = 0, x_i = (4/2^{N−i}, 0) for 0 < i < N, x_N = (2, 1), in z = 0.
pub fn counterexample_rod(n: usize) -> Result<DiscreteRod> {
    if n < 3 {
        return Err(Error::TooFewPoints { min: 3, got: n });
    }
    let mut pts = vec![Vec3::zeros()];
    for i in 1..n {
        pts.push(Vec3::new(4.0 / 2f64.powi((n - i) as i32), 0.0, 0.0));
    }
    pts.push(Vec3::new(2.0, 1.0, 0.0));
    DiscreteRod::new(pts)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(skip)]
    pub rod: FramedDiscreteRod,
    pub energy: EnergyReport,
    /// y'(2).
    pub velocity_at_2: [f64; 3],
    /// |1 − |y'(2)||.
    pub speed_defect: f64,
}

/// Energies of the spacing counterexample: λ = 1 and bend = 2 for every N,
/// while the longest edge stays 1 and the penalty grows like N^β.
pub fn counterexample_spacing(n: usize, pen: &PenaltyParams) -> Result<CounterexampleReport> {
    let rod = FramedDiscreteRod::untwisted(counterexample_rod(n)?);
    let energy = total_energy(&rod, n, COUNTEREXAMPLE_LENGTH, pen, &MaterialParams::default())?;
    let y = build_spline(rod.rod(), COUNTEREXAMPLE_LENGTH)?;
    let v = y.deriv1(2.0)?;
    Ok(CounterexampleReport {
        n,
        rod,
        energy,
        velocity_at_2: [v.x, v.y, v.z],
        speed_defect: (1.0 - v.norm()).abs(),
    })
}

/// Distance mod constant rotation between the recovery spline's Bishop field
/// and the curve's Bishop field, per N.
pub fn frame_study<C: ArcLengthCurve + ?Sized>(curve: &C, n_list: &[usize], steps: usize) -> Result<Vec<(usize, f64)>> {
    sorted_unique(n_list)
        .par_iter()
        .map(|&n| {
            let framed = recovery_rod(curve, &TwistProfile::zero(), n)?;
            Ok((n, frame_distance_for(curve, framed.rod(), steps)?))
        })
        .collect()
}

/// sup_t ||y'(t)| − λ| over `samples` uniform points and the bound
/// ‖y''‖_{L²} λ^{−1/2} max_i √r_i.
pub fn speed_check(rod: &DiscreteRod, length: f64, samples: usize) -> Result<(f64, f64)> {
    let y = build_spline(rod, length)?;
    let lambda = y.lambda();
    let deviation = y.sample(samples).iter().map(|s| (s.deriv1.norm() - lambda).abs()).fold(0.0, f64::max);
    let bound = y.bend_energy().sqrt() / lambda.sqrt() * rod.max_edge().sqrt();
    Ok((deviation, bound))
}

/// r_N for each N.
pub fn radius_sweep<C: ArcLengthCurve + ?Sized>(curve: &C, n_list: &[usize]) -> Result<Vec<(usize, f64)>> {
    sorted_unique(n_list).par_iter().map(|&n| Ok((n, solve_r_n(curve, n)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{make_arc, make_helix, make_line};
    use std::f64::consts::PI;

    #[test]
    fn line_with_linear_twist() {
        let line = make_line(2.0).unwrap();
        let t = converge(&line, &TwistProfile::unit_linear(), &DEFAULT_N_LIST, &PenaltyParams::default(), &MaterialParams::default())
            .unwrap();
        assert_eq!(t.rows.len(), 6);
        for r in &t.rows {
            assert_eq!(r.bend, 0.0);
            let n = r.n as f64;
            // Interior slopes are exact; the caps hold the twist constant.
            assert!((r.tor - 2.0 * (n - 1.0) / n).abs() < 1e-12);
            assert!((r.pen - 2.0 * n.powf(-0.5)).abs() < 1e-12);
            assert!(r.frame_dist < 1e-12);
            assert!((r.total - (r.bend + r.tor + r.pen)).abs() <= 1e-12 * r.total);
        }
        assert!(t.rows.windows(2).all(|w| w[0].n < w[1].n && w[1].tor_err < w[0].tor_err));
    }

    #[test]
    fn arc_bending_converges() {
        let arc = make_arc(1.0, PI).unwrap();
        let t = converge(&arc, &TwistProfile::zero(), &[256, 16, 64, 32, 128], &PenaltyParams::default(), &MaterialParams::default())
            .unwrap();
        let last = t.rows.last().unwrap();
        assert!(last.bend_err < 0.01 * PI);
        assert!(t.rows.windows(2).all(|w| w[1].bend_err <= w[0].bend_err));
        assert!(t.rows.windows(2).all(|w| w[1].pen < w[0].pen));
    }

    #[test]
    fn table_csv_header() {
        let line = make_line(1.0).unwrap();
        let t = converge(&line, &TwistProfile::zero(), &[8], &PenaltyParams::default(), &MaterialParams::default()).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), TABLE_CSV_HEADER);
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 10);
    }

    #[test]
    fn riemann_sums() {
        assert!(riemann_bend(&make_line(3.0).unwrap(), 10).unwrap() < 1e-20);
        let arc = make_arc(1.0, PI).unwrap();
        let n = 128;
        let h = PI / n as f64;
        // Second differences on the unit circle have length 2(1 − cos h).
        let expect = h * (n - 1) as f64 * (2.0 * (1.0 - h.cos()) / (h * h)).powi(2);
        let b = riemann_bend(&arc, n).unwrap();
        assert!((b - expect).abs() < 1e-9);
        assert!((b - PI).abs() / PI < 0.01);
        // θ(s) = s on [0, 1]: every difference quotient is 1, with N − 1 terms.
        for n in [3, 10, 77] {
            let t = riemann_tor(&TwistProfile::unit_linear(), 1.0, n).unwrap();
            assert!((t - (n - 1) as f64 / n as f64).abs() < 1e-14);
        }
        assert!(riemann_bend(&arc, 2).is_err());
    }

    #[test]
    fn counterexample_is_constant_in_n() {
        let p = PenaltyParams::default();
        let a = counterexample_spacing(6, &p).unwrap();
        let b = counterexample_spacing(12, &p).unwrap();
        assert!((a.energy.lambda - 1.0).abs() < 1e-15);
        assert!((a.energy.bend - 2.0).abs() < 1e-13);
        assert!((a.velocity_at_2[0] - 0.5).abs() < 1e-15 && (a.velocity_at_2[1] - 0.5).abs() < 1e-15);
        assert!((a.speed_defect - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
        assert!((b.energy.pen - 12f64.sqrt()).abs() < 1e-12);
        let ya = build_spline(a.rod.rod(), 3.0).unwrap();
        let yb = build_spline(b.rod.rod(), 3.0).unwrap();
        let diff = ya
            .sample(1001)
            .iter()
            .zip(yb.sample(1001))
            .map(|(p, q)| (p.point - q.point).norm())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-12);
        assert!(counterexample_spacing(2, &p).is_err());
        let json = serde_json::to_value(&a).unwrap();
        assert!(json.get("energy").unwrap().get("N").is_some());
    }

    #[test]
    fn frame_study_trends() {
        let line = make_line(1.0).unwrap();
        for (_, d) in frame_study(&line, &[8, 16], 8).unwrap() {
            assert!(d < 1e-12);
        }
        let arc = make_arc(1.0, PI).unwrap();
        let d = frame_study(&arc, &[16, 32, 64], 8).unwrap();
        assert!(d[0].1 > d[1].1 && d[1].1 > d[2].1, "{d:?}");
        let helix = make_helix(1.0, 1.0, 4.0).unwrap();
        let d = frame_study(&helix, &[16, 128], 8).unwrap();
        assert!(d[0].1 >= 4.0 * d[1].1, "{d:?}");
    }

    #[test]
    fn speed_bound_holds_for_recovery_rods() {
        let helix = make_helix(1.0, 1.0, 4.0).unwrap();
        for n in [8, 32] {
            let rod = recovery_rod(&helix, &TwistProfile::zero(), n).unwrap();
            let (dev, bound) = speed_check(rod.rod(), 4.0, 10_000).unwrap();
            assert!(dev <= bound + 1e-10);
        }
    }
}
