//! Equal-chord discretization of arc-length curves.
//!
//! Starting at u(0), each step jumps to the first later point at chord
//! distance r. For small r (r·‖u''‖∞ < 1) the chord grows monotonically with
//! the arc, so the first root is bracketed by marching forward and then
//! polished. r_N is the largest radius giving N chords; the walk at r_N ends
//! exactly at u(L).

use crate::curves::{ArcLengthCurve, TwistProfile};
use crate::error::{Error, Result};
use crate::rod::{DiscreteRod, FramedDiscreteRod};

/// Points s₀ = 0 < s₁ < … produced by repeated [`step`] calls at radius `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChordWalk {
    pub r: f64,
    pub s: Vec<f64>,
    /// The walk stopped because no point of the remaining arc is at distance
    /// r, leaving a nonempty piece of the curve uncovered.
    pub terminated: bool,
}

impl ChordWalk {
    /// N(r), the number of chords.
    pub fn segments(&self) -> usize {
        self.s.len() - 1
    }

    /// Arc length left between the last point and L.
    pub fn remainder(&self, length: f64) -> f64 {
        length - self.s[self.s.len() - 1]
    }
}

fn check_radius<C: ArcLengthCurve + ?Sized>(curve: &C, r: f64) -> Result<()> {
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    let product = r * curve.sup_deriv2();
    if !(product < 1.0) {
        return Err(Error::OutsideSmallRadius { r, product });
    }
    Ok(())
}

/// First root of |u(s) − u(s_i)| = r on (s_i, L], or `None` when the rest of
/// the curve stays inside the ball of radius r.
pub fn step<C: ArcLengthCurve + ?Sized>(curve: &C, s_i: f64, r: f64) -> Result<Option<f64>> {
    check_radius(curve, r)?;
    let l = curve.length();
    if !(s_i >= 0.0 && s_i <= l) {
        return Err(Error::OutOfDomain { t: s_i, lo: 0.0, hi: l });
    }
    Ok(step_unchecked(curve, s_i, r))
}

fn step_unchecked<C: ArcLengthCurve + ?Sized>(curve: &C, s_i: f64, r: f64) -> Option<f64> {
    let l = curve.length();
    let origin = curve.eval(s_i);
    let g = |s: f64| (curve.eval(s) - origin).norm() - r;
    // Chord ≤ arc, so nothing before s_i + r can be at distance r.
    let mut a = s_i + r;
    // Rounding must not lose a root sitting exactly at L.
    let slack = 4.0 * f64::EPSILON * (1.0 + l);
    if a > l {
        return (a - l <= slack && g(l) >= -slack).then_some(l);
    }
    let mut ga = g(a);
    if ga >= 0.0 {
        return Some(a);
    }
    let h = 0.25 * r;
    let mut b;
    let mut gb;
    loop {
        b = (a + h).min(l);
        gb = g(b);
        if gb >= 0.0 {
            break;
        }
        if b >= l {
            return (gb >= -slack).then_some(l);
        }
        a = b;
        ga = gb;
    }
    Some(illinois(&g, a, ga, b, gb))
}

/// Regula falsi with the Illinois modification on a bracket g(a) < 0 ≤ g(b).
fn illinois(g: &impl Fn(f64) -> f64, mut a: f64, mut ga: f64, mut b: f64, mut gb: f64) -> f64 {
    if gb == 0.0 {
        return b;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let mut c = (a * gb - b * ga) / (gb - ga);
        if !(c > a && c < b) {
            c = 0.5 * (a + b);
        }
        let gc = g(c);
        if gc == 0.0 {
            return c;
        }
        if gc < 0.0 {
            a = c;
            ga = gc;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            gb = gc;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
        if b - a <= 1e-15 * (1.0 + b.abs()) {
            break;
        }
    }
    // The root-side endpoint: g(b) ≥ 0 and b − a is at rounding level.
    if gb.abs() <= ga.abs() {
        b
    } else {
        a
    }
}

fn walk<C: ArcLengthCurve + ?Sized>(curve: &C, r: f64, max_segments: usize) -> ChordWalk {
    let l = curve.length();
    let mut s = vec![0.0];
    let mut terminated = false;
    while s.len() <= max_segments {
        match step_unchecked(curve, s[s.len() - 1], r) {
            Some(next) => s.push(next),
            None => {
                terminated = l - s[s.len() - 1] > 1e-12 * l.max(1.0);
                break;
            }
        }
    }
    ChordWalk { r, s, terminated }
}

/// Walks the whole curve at radius r; the number of chords is N(r).
pub fn count_segments<C: ArcLengthCurve + ?Sized>(curve: &C, r: f64) -> Result<ChordWalk> {
    check_radius(curve, r)?;
    Ok(walk(curve, r, usize::MAX))
}

/// r_N, the largest radius whose walk has N chords; the N-th point is u(L)
/// to 1e-12.
pub fn solve_r_n<C: ArcLengthCurve + ?Sized>(curve: &C, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let l = curve.length();
    let h = l / n as f64;
    if !(h * curve.sup_deriv2() < 1.0) {
        return Err(Error::BracketFailure { n, reason: format!("L/N = {h} is outside the small-radius regime") });
    }
    let tol = 1e-12 * l.max(1.0);
    // s_N(r) − L, or +1 when the walk has fewer than N chords.
    let defect = |r: f64| -> f64 {
        let w = walk(curve, r, n);
        if w.segments() < n {
            1.0
        } else {
            w.s[n] - l
        }
    };
    let at_hi = defect(h);
    if at_hi.abs() <= tol {
        return Ok(h);
    }
    let mut lo = h * (1.0 - h * h * curve.sup_deriv3()) * (1.0 - 1e-12);
    if !(lo > 0.0) {
        return Err(Error::BracketFailure { n, reason: "lower radius bound is not positive".into() });
    }
    let at_lo = defect(lo);
    if at_lo.abs() <= tol {
        return Ok(lo);
    }
    if !(at_lo < 0.0 && at_hi > 0.0) {
        return Err(Error::BracketFailure {
            n,
            reason: format!("no sign change of s_N(r) - L on [{lo}, {h}]"),
        });
    }
    let mut hi = h;
    let mut lo_defect = at_lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let d = defect(mid);
        if d == 0.0 {
            return Ok(mid);
        }
        if d < 0.0 {
            lo = mid;
            lo_defect = d;
        } else {
            hi = mid;
        }
    }
    if lo_defect.abs() > tol {
        return Err(Error::BracketFailure { n, reason: format!("bisection stalled with s_N - L = {lo_defect}") });
    }
    Ok(lo)
}

/// The walk at r_N with its last parameter set to L.
pub fn recovery_walk<C: ArcLengthCurve + ?Sized>(curve: &C, n: usize) -> Result<ChordWalk> {
    let r = solve_r_n(curve, n)?;
    let mut w = walk(curve, r, n);
    if w.segments() != n {
        return Err(Error::BracketFailure { n, reason: format!("walk at r_N has {} chords", w.segments()) });
    }
    w.s[n] = curve.length();
    w.terminated = false;
    Ok(w)
}

/// Equal-chord rod x_i = u(s_i) with angles θ at the arc-length midpoints of
/// the edges.
pub fn recovery_rod<C: ArcLengthCurve + ?Sized>(
    curve: &C,
    twist: &TwistProfile,
    n: usize,
) -> Result<FramedDiscreteRod> {
    let w = recovery_walk(curve, n)?;
    let points = w.s.iter().map(|&s| curve.eval(s)).collect();
    let angles = w.s.windows(2).map(|p| twist.eval(0.5 * (p[0] + p[1]))).collect();
    FramedDiscreteRod::new(DiscreteRod::new(points)?, angles)
}
