//! Discrete Kirchhoff rods.
//!
//! A framed discrete rod (points plus per-edge twist angles) is identified with
//! a C¹ piecewise-cubic space curve and a piecewise-linear twist function. The
//! crate provides that assignment, Bishop frames on both the spline and the
//! polygon, closed-form bending/torsion/penalty energies, the equal-chord
//! discretization of smooth arc-length curves and the tooling used to check
//! that recovery discretizations reproduce the continuum energy.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curves;
pub mod discretize;
pub mod energy;
pub mod error;
pub mod frames;
pub mod harness;
pub mod io;
pub mod quadrature;
pub mod rod;
pub mod spline;

mod sum;

pub use curves::{AnalyticCurve, ArcLengthCurve, TwistProfile};
pub use discretize::{count_segments, recovery_rod, solve_r_n, step, ChordWalk};
pub use energy::{
    bend_energy_spline, bend_local, penalty, tor_energy, tor_local, total_energy, EnergyReport,
    MaterialParams, PenaltyMode, PenaltyParams,
};
pub use error::{Error, Result};
pub use frames::{Frame, FrameField};
pub use rod::{DiscreteRod, FramedDiscreteRod, KnotPartition};
pub use spline::{build_spline, build_twist, CubicSegment, SplineCurve, TwistFunction};

/// Three-vector used for points, tangents and axial vectors.
pub type Vec3 = nalgebra::Vector3<f64>;
