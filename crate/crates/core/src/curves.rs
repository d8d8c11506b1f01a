//! Analytic arc-length parametrized curves and twist profiles.
//!
//! These are the continuum reference objects for every convergence
//! experiment: each fixture knows its derivatives up to third order, the sup
//! norms of the second and third derivative, and (where available) its exact
//! bending energy ∫|u''|².

use std::fmt;

use crate::error::{Error, Result};
use crate::quadrature::integrate_adaptive;
use crate::Vec3;

/// A C³ curve parametrized by arc length on [0, L].
pub trait ArcLengthCurve: Send + Sync {
    fn length(&self) -> f64;
    fn eval(&self, s: f64) -> Vec3;
    fn deriv1(&self, s: f64) -> Vec3;
    fn deriv2(&self, s: f64) -> Vec3;
    fn deriv3(&self, s: f64) -> Vec3;
    /// sup |u''| over [0, L].
    fn sup_deriv2(&self) -> f64;
    /// sup |u'''| over [0, L].
    fn sup_deriv3(&self) -> f64;
    /// ∫₀ᴸ |u''|² ds when a closed form is known.
    fn exact_bend_energy(&self) -> Option<f64> {
        None
    }

    /// ∫₀ᴸ |u''|² ds, closed form if available, quadrature otherwise.
    fn bend_energy(&self) -> f64 {
        self.exact_bend_energy().unwrap_or_else(|| {
            integrate_adaptive(|s| self.deriv2(s).norm_squared(), 0.0, self.length(), 1e-12)
        })
    }
}

/// The three curve fixtures: straight line, circular arc and helix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticCurve {
    /// u(s) = (s, 0, 0).
    Line { length: f64 },
    /// u(s) = R (cos(s/R), sin(s/R), 0).
    Arc { radius: f64, length: f64 },
    /// u(s) = (a cos(s/c), a sin(s/c), b s/c) with c = √(a² + b²).
    Helix { a: f64, b: f64, length: f64 },
}

fn check_length(length: f64) -> Result<()> {
    if length.is_finite() && length > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("curve length must be positive, got {length}")))
    }
}

/// Straight segment of the given length along the x axis.
pub fn make_line(length: f64) -> Result<AnalyticCurve> {
    check_length(length)?;
    Ok(AnalyticCurve::Line { length })
}

/// Circular arc of the given radius, starting at (R, 0, 0).
pub fn make_arc(radius: f64, length: f64) -> Result<AnalyticCurve> {
    check_length(length)?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!("arc radius must be positive, got {radius}")));
    }
    Ok(AnalyticCurve::Arc { radius, length })
}

/// Helix of radius `a` and pitch parameter `b`, reparametrized by arc length.
pub fn make_helix(a: f64, b: f64, length: f64) -> Result<AnalyticCurve> {
    check_length(length)?;
    if !(a.is_finite() && b.is_finite()) || (a == 0.0 && b == 0.0) {
        return Err(Error::InvalidParameter(format!("helix needs (a, b) != (0, 0), got ({a}, {b})")));
    }
    Ok(AnalyticCurve::Helix { a, b, length })
}

impl AnalyticCurve {
    pub fn name(&self) -> &'static str {
        match self {
            AnalyticCurve::Line { .. } => "line",
            AnalyticCurve::Arc { .. } => "arc",
            AnalyticCurve::Helix { .. } => "helix",
        }
    }

    /// Builds a fixture from its name and a parameter list:
    /// `line: L`, `arc: R, L`, `helix: a, b, L`.
    pub fn from_params(name: &str, params: &[f64]) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if params.len() == n {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!(
                    "curve '{name}' expects {n} parameter(s), got {}",
                    params.len()
                )))
            }
        };
        match name {
            "line" => {
                want(1)?;
                make_line(params[0])
            }
            "arc" => {
                want(2)?;
                make_arc(params[0], params[1])
            }
            "helix" => {
                want(3)?;
                make_helix(params[0], params[1], params[2])
            }
            other => Err(Error::InvalidParameter(format!("unknown curve '{other}'"))),
        }
    }

    fn helix_c(a: f64, b: f64) -> f64 {
        a.hypot(b)
    }
}

impl fmt::Display for AnalyticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AnalyticCurve::Line { length } => write!(f, "line(L={length})"),
            AnalyticCurve::Arc { radius, length } => write!(f, "arc(R={radius}, L={length})"),
            AnalyticCurve::Helix { a, b, length } => write!(f, "helix(a={a}, b={b}, L={length})"),
        }
    }
}

impl ArcLengthCurve for AnalyticCurve {
    fn length(&self) -> f64 {
        match *self {
            AnalyticCurve::Line { length }
            | AnalyticCurve::Arc { length, .. }
            | AnalyticCurve::Helix { length, .. } => length,
        }
    }

    fn eval(&self, s: f64) -> Vec3 {
        match *self {
            AnalyticCurve::Line { .. } => Vec3::new(s, 0.0, 0.0),
            AnalyticCurve::Arc { radius, .. } => {
                let w = s / radius;
                Vec3::new(radius * w.cos(), radius * w.sin(), 0.0)
            }
            AnalyticCurve::Helix { a, b, .. } => {
                let c = Self::helix_c(a, b);
                let w = s / c;
                Vec3::new(a * w.cos(), a * w.sin(), b * w)
            }
        }
    }

    fn deriv1(&self, s: f64) -> Vec3 {
        match *self {
            AnalyticCurve::Line { .. } => Vec3::new(1.0, 0.0, 0.0),
            AnalyticCurve::Arc { radius, .. } => {
                let w = s / radius;
                Vec3::new(-w.sin(), w.cos(), 0.0)
            }
            AnalyticCurve::Helix { a, b, .. } => {
                let c = Self::helix_c(a, b);
                let w = s / c;
                Vec3::new(-a * w.sin() / c, a * w.cos() / c, b / c)
            }
        }
    }

    fn deriv2(&self, s: f64) -> Vec3 {
        match *self {
            AnalyticCurve::Line { .. } => Vec3::zeros(),
            AnalyticCurve::Arc { radius, .. } => {
                let w = s / radius;
                Vec3::new(-w.cos(), -w.sin(), 0.0) / radius
            }
            AnalyticCurve::Helix { a, b, .. } => {
                let c = Self::helix_c(a, b);
                let w = s / c;
                Vec3::new(-w.cos(), -w.sin(), 0.0) * (a / (c * c))
            }
        }
    }

    fn deriv3(&self, s: f64) -> Vec3 {
        match *self {
            AnalyticCurve::Line { .. } => Vec3::zeros(),
            AnalyticCurve::Arc { radius, .. } => {
                let w = s / radius;
                Vec3::new(w.sin(), -w.cos(), 0.0) / (radius * radius)
            }
            AnalyticCurve::Helix { a, b, .. } => {
                let c = Self::helix_c(a, b);
                let w = s / c;
                Vec3::new(w.sin(), -w.cos(), 0.0) * (a / (c * c * c))
            }
        }
    }

    fn sup_deriv2(&self) -> f64 {
        match *self {
            AnalyticCurve::Line { .. } => 0.0,
            AnalyticCurve::Arc { radius, .. } => 1.0 / radius,
            AnalyticCurve::Helix { a, b, .. } => {
                let c = Self::helix_c(a, b);
                a.abs() / (c * c)
            }
        }
    }

    fn sup_deriv3(&self) -> f64 {
        match *self {
            AnalyticCurve::Line { .. } => 0.0,
            AnalyticCurve::Arc { radius, .. } => 1.0 / (radius * radius),
            AnalyticCurve::Helix { a, b, .. } => {
                let c = Self::helix_c(a, b);
                a.abs() / (c * c * c)
            }
        }
    }

    fn exact_bend_energy(&self) -> Option<f64> {
        Some(match *self {
            AnalyticCurve::Line { .. } => 0.0,
            AnalyticCurve::Arc { radius, length } => length / (radius * radius),
            AnalyticCurve::Helix { a, b, length } => {
                let c2 = a * a + b * b;
                length * a * a / (c2 * c2)
            }
        })
    }
}

/// Twist angle θ(s) along the curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwistProfile {
    /// θ ≡ value.
    Constant(f64),
    /// θ(s) = offset + slope·s.
    Linear { slope: f64, offset: f64 },
    /// θ(s) = amplitude·sin(frequency·s).
    Sine { amplitude: f64, frequency: f64 },
}

impl TwistProfile {
    pub fn zero() -> Self {
        TwistProfile::Constant(0.0)
    }

    /// θ(s) = s.
    pub fn unit_linear() -> Self {
        TwistProfile::Linear { slope: 1.0, offset: 0.0 }
    }

    /// θ(s) = sin s.
    pub fn unit_sine() -> Self {
        TwistProfile::Sine { amplitude: 1.0, frequency: 1.0 }
    }

    /// `zero`, `linear` (θ = s) or `sine` (θ = sin s).
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "zero" => Ok(Self::zero()),
            "linear" => Ok(Self::unit_linear()),
            "sine" => Ok(Self::unit_sine()),
            other => Err(Error::InvalidParameter(format!("unknown twist profile '{other}'"))),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            TwistProfile::Constant(c) => c,
            TwistProfile::Linear { slope, offset } => offset + slope * s,
            TwistProfile::Sine { amplitude, frequency } => amplitude * (frequency * s).sin(),
        }
    }

    pub fn deriv(&self, s: f64) -> f64 {
        match *self {
            TwistProfile::Constant(_) => 0.0,
            TwistProfile::Linear { slope, .. } => slope,
            TwistProfile::Sine { amplitude, frequency } => amplitude * frequency * (frequency * s).cos(),
        }
    }

    /// ∫₀ᴸ |θ'|² ds in closed form.
    pub fn exact_tor_energy(&self, length: f64) -> Option<f64> {
        Some(match *self {
            TwistProfile::Constant(_) => 0.0,
            TwistProfile::Linear { slope, .. } => slope * slope * length,
            TwistProfile::Sine { amplitude, frequency } => {
                if frequency == 0.0 {
                    0.0
                } else {
                    let k = amplitude * frequency;
                    k * k * (0.5 * length + (2.0 * frequency * length).sin() / (4.0 * frequency))
                }
            }
        })
    }

    pub fn tor_energy(&self, length: f64) -> f64 {
        self.exact_tor_energy(length)
            .unwrap_or_else(|| integrate_adaptive(|s| self.deriv(s).powi(2), 0.0, length, 1e-12))
    }
}

/// ∫₀ᴸ |u''|² + |θ'|² ds: closed forms when both exist, quadrature otherwise.
pub fn continuous_energy(curve: &dyn ArcLengthCurve, twist: &TwistProfile) -> f64 {
    let length = curve.length();
    match (curve.exact_bend_energy(), twist.exact_tor_energy(length)) {
        (Some(b), Some(t)) => b + t,
        _ => integrate_adaptive(
            |s| curve.deriv2(s).norm_squared() + twist.deriv(s).powi(2),
            0.0,
            length,
            1e-12,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn fixtures() -> Vec<AnalyticCurve> {
        vec![
            make_line(1.0).unwrap(),
            make_arc(1.0, PI).unwrap(),
            make_arc(0.7, 2.0).unwrap(),
            make_helix(1.0, 1.0, 4.0).unwrap(),
            make_helix(0.5, 2.0, 3.0).unwrap(),
        ]
    }

    #[test]
    fn constructors_reject_bad_parameters() {
        assert!(make_line(0.0).is_err());
        assert!(make_line(-1.0).is_err());
        assert!(make_arc(0.0, 1.0).is_err());
        assert!(make_arc(1.0, -2.0).is_err());
        assert!(make_helix(0.0, 0.0, 1.0).is_err());
        assert!(AnalyticCurve::from_params("arc", &[1.0]).is_err());
        assert!(AnalyticCurve::from_params("spiral", &[1.0]).is_err());
    }

    #[test]
    fn line_has_no_curvature() {
        let line = make_line(1.0).unwrap();
        assert_eq!(line.deriv2(0.5), Vec3::zeros());
    }

    #[test]
    fn helix_unit_speed_at_start() {
        let h = make_helix(1.0, 1.0, 2.0 * PI).unwrap();
        assert!((h.deriv1(0.0).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn arc_length_invariants_on_random_samples() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for c in fixtures() {
            for _ in 0..100 {
                let s = rng.gen::<f64>() * c.length();
                assert!((c.deriv1(s).norm() - 1.0).abs() <= 1e-12, "{c} at {s}");
                assert!(c.deriv1(s).dot(&c.deriv2(s)).abs() <= 1e-12, "{c} at {s}");
            }
        }
    }

    #[test]
    fn derivatives_match_central_differences() {
        let h = 1e-5;
        for c in fixtures() {
            for k in 1..10 {
                let s = c.length() * k as f64 / 10.0;
                let d1 = (c.eval(s + h) - c.eval(s - h)) / (2.0 * h);
                let d2 = (c.deriv1(s + h) - c.deriv1(s - h)) / (2.0 * h);
                let d3 = (c.deriv2(s + h) - c.deriv2(s - h)) / (2.0 * h);
                assert!((d1 - c.deriv1(s)).norm() < 1e-8, "{c}");
                assert!((d2 - c.deriv2(s)).norm() < 1e-8, "{c}");
                assert!((d3 - c.deriv3(s)).norm() < 1e-8, "{c}");
            }
        }
    }

    #[test]
    fn sup_norms_bound_sampled_derivatives() {
        for c in fixtures() {
            for k in 0..=50 {
                let s = c.length() * k as f64 / 50.0;
                assert!(c.deriv2(s).norm() <= c.sup_deriv2() * (1.0 + 1e-14) + 1e-300);
                assert!(c.deriv3(s).norm() <= c.sup_deriv3() * (1.0 + 1e-14) + 1e-300);
            }
        }
    }

    #[test]
    fn exact_bend_energies_match_quadrature() {
        let rule = GaussLegendre::new(32);
        for c in fixtures() {
            let q = rule.integrate_composite(|s| c.deriv2(s).norm_squared(), 0.0, c.length(), 64);
            let exact = c.exact_bend_energy().unwrap();
            assert!((q - exact).abs() <= 1e-12 * (1.0 + exact), "{c}: {q} vs {exact}");
        }
        let arc = make_arc(1.0, PI).unwrap();
        assert!((arc.exact_bend_energy().unwrap() - PI).abs() < 1e-15);
    }

    #[test]
    fn chord_is_bracketed_by_arc_estimates() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for c in fixtures() {
            for _ in 0..100 {
                let l = 0.1 * rng.gen::<f64>();
                let s0 = rng.gen::<f64>() * (c.length() - l);
                let r = (c.eval(s0 + l) - c.eval(s0)).norm();
                assert!(r <= l + 1e-12);
                assert!(r >= l - l.powi(3) / 6.0 * c.sup_deriv3() - 1e-12);
            }
        }
    }

    #[test]
    fn continuous_energy_examples() {
        let line = make_line(1.0).unwrap();
        assert_eq!(continuous_energy(&line, &TwistProfile::zero()), 0.0);

        let arc = make_arc(1.0, PI).unwrap();
        assert!((continuous_energy(&arc, &TwistProfile::zero()) - PI).abs() < 1e-14);

        let line = make_line(2.0 * PI).unwrap();
        let e = continuous_energy(&line, &TwistProfile::unit_sine());
        let oracle = GaussLegendre::new(32).integrate_composite(|s| s.cos().powi(2), 0.0, 2.0 * PI, 16);
        assert!((e - oracle).abs() < 1e-12);
        assert!((e - PI).abs() < 1e-12);
    }

    #[test]
    fn twist_closed_forms_match_quadrature() {
        let rule = GaussLegendre::new(32);
        for tw in [
            TwistProfile::Constant(0.3),
            TwistProfile::Linear { slope: -1.5, offset: 2.0 },
            TwistProfile::Sine { amplitude: 0.7, frequency: 2.3 },
        ] {
            let l = 3.7;
            let q = rule.integrate_composite(|s| tw.deriv(s).powi(2), 0.0, l, 64);
            assert!((q - tw.exact_tor_energy(l).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn twist_derivative_matches_difference_quotient() {
        let tw = TwistProfile::Sine { amplitude: 1.3, frequency: 0.8 };
        let h = 1e-6;
        for k in 0..10 {
            let s = 0.37 * k as f64;
            let fd = (tw.eval(s + h) - tw.eval(s - h)) / (2.0 * h);
            assert!((fd - tw.deriv(s)).abs() < 1e-8);
        }
    }
}
