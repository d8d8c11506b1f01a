//! Discrete rods: point chains, per-edge twist angles and the knot partition
//! that maps a chain onto the parameter interval [0, L].

use crate::error::{Error, Result};
use crate::sum::{compensated_sum, CompensatedSum};
use crate::Vec3;

/// Consecutive edges whose turning angle reaches π − this are rejected.
pub const REVERSAL_MARGIN: f64 = 1e-9;

/// Angle between two vectors, via atan2(|a × b|, a · b).
pub fn angle_between(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// Ordered points x₀ … x_N (N ≥ 1 edges), no zero-length edges and no
/// consecutive edges turning back on themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteRod {
    points: Vec<Vec3>,
}

impl DiscreteRod {
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewPoints { min: 2, got: points.len() });
        }
        if points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(Error::InvalidParameter("rod points must be finite".into()));
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[1] == w[0] || (w[1] - w[0]).norm() == 0.0 {
                return Err(Error::DegenerateEdge { index: i + 1 });
            }
        }
        for (i, w) in points.windows(3).enumerate() {
            let e0 = w[1] - w[0];
            let e1 = w[2] - w[1];
            if angle_between(&e0, &e1) >= std::f64::consts::PI - REVERSAL_MARGIN {
                return Err(Error::ReversingEdges { index: i + 1 });
            }
        }
        Ok(Self { points })
    }

    pub fn from_arrays(points: &[[f64; 3]]) -> Result<Self> {
        Self::new(points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect())
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    /// Number of edges N.
    pub fn edge_count(&self) -> usize {
        self.points.len() - 1
    }

    /// Edge vector x_i − x_{i−1} for i = 1 … N.
    pub fn edge(&self, i: usize) -> Vec3 {
        self.points[i] - self.points[i - 1]
    }

    /// r_i = |x_i − x_{i−1}|, i = 1 … N (returned 0-based).
    pub fn chord_lengths(&self) -> Vec<f64> {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).collect()
    }

    /// ℓ(X), the polygon length (compensated sum).
    pub fn total_length(&self) -> f64 {
        compensated_sum(self.chord_lengths())
    }

    pub fn max_edge(&self) -> f64 {
        self.chord_lengths().into_iter().fold(0.0, f64::max)
    }

    /// Turning angle φ_i between edge i and edge i+1 at each interior vertex
    /// x_i, i = 1 … N−1 (returned 0-based), in [0, π).
    pub fn edge_angles(&self) -> Vec<f64> {
        self.points
            .windows(3)
            .map(|w| angle_between(&(w[1] - w[0]), &(w[2] - w[1])))
            .collect()
    }

    /// Knot partition of [0, ℓ(X)] and its rescaling onto [0, L].
    pub fn partition(&self, length: f64) -> Result<KnotPartition> {
        KnotPartition::new(&self.chord_lengths(), length)
    }
}

/// A discrete rod plus one twist angle per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedDiscreteRod {
    rod: DiscreteRod,
    angles: Vec<f64>,
}

impl FramedDiscreteRod {
    pub fn new(rod: DiscreteRod, angles: Vec<f64>) -> Result<Self> {
        if angles.len() != rod.edge_count() {
            return Err(Error::AngleCountMismatch { expected: rod.edge_count(), got: angles.len() });
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter("twist angles must be finite".into()));
        }
        Ok(Self { rod, angles })
    }

    /// Rod with all twist angles zero.
    pub fn untwisted(rod: DiscreteRod) -> Self {
        let angles = vec![0.0; rod.edge_count()];
        Self { rod, angles }
    }

    pub fn rod(&self) -> &DiscreteRod {
        &self.rod
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn into_parts(self) -> (DiscreteRod, Vec<f64>) {
        (self.rod, self.angles)
    }
}

/// Knots τ₀ … τ_{N+1} on [0, ℓ(X)] and t_i = τ_i / λ(X) on [0, L].
///
/// τ₀ = 0, τ_{N+1} = ℓ(X) and the interior knots sit at the arc-length
/// positions of the edge midpoints along the polygon.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotPartition {
    pub total_length: f64,
    pub reference_length: f64,
    pub lambda: f64,
    pub taus: Vec<f64>,
    pub ts: Vec<f64>,
}

impl KnotPartition {
    pub fn new(chords: &[f64], reference_length: f64) -> Result<Self> {
        if !(reference_length.is_finite() && reference_length > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "reference length must be positive, got {reference_length}"
            )));
        }
        if chords.is_empty() {
            return Err(Error::TooFewPoints { min: 2, got: 1 });
        }
        let n = chords.len();
        let mut taus = Vec::with_capacity(n + 2);
        taus.push(0.0);
        let mut acc = CompensatedSum::default();
        for &r in chords {
            acc.add(r);
            let mut mid = acc;
            mid.add(-0.5 * r);
            taus.push(mid.value());
        }
        let total_length = acc.value();
        taus.push(total_length);
        let lambda = total_length / reference_length;
        let mut ts: Vec<f64> = taus.iter().map(|tau| tau / lambda).collect();
        // Pin the end knot to L exactly.
        ts[n + 1] = reference_length;
        Ok(Self { total_length, reference_length, lambda, taus, ts })
    }

    /// Number of edges N.
    pub fn edge_count(&self) -> usize {
        self.taus.len() - 2
    }
}
