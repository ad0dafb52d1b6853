//! Fiber metric spaces `X` and their geodesics.
//!
//! Every fiber is a length space; all built-ins are geodesic, so maximal
//! causal curves in the cone can be assembled from fiber geodesics.

mod any;
mod graph;
mod model;
mod smooth;

pub use any::{AnyFiber, AnyPoint};
pub use graph::{GraphPoint, MetricGraph};
pub use model::{realize_metric_triangle, ModelSurface};
pub use smooth::{Circle, EuclideanN, Hyperbolic2, RealLine, Sphere2};

use crate::error::{Error, Result};
use rand::RngCore;
use std::fmt::Debug;

/// Rule for choosing among several minimizing geodesics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Deterministic choice (lexicographic on edge ids / reference axes).
    #[default]
    Canonical,
    /// Choice derived from a seed; still deterministic for a fixed seed.
    Seeded(u64),
    /// Report [`Error::AmbiguousGeodesic`] instead of choosing.
    Reject,
}

/// Relative tolerance under which two route lengths count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// A metric length space usable as the fiber of a cone.
pub trait FiberSpace: Send + Sync {
    type Point: Clone + Debug + PartialEq + Send + Sync;

    fn name(&self) -> String;

    fn distance(&self, p: &Self::Point, q: &Self::Point) -> f64;

    /// Point at fraction `u` in `[0, 1]` along a minimizing geodesic from `p` to `q`.
    fn geodesic_point(&self, p: &Self::Point, q: &Self::Point, u: f64) -> Result<Self::Point>;

    /// Whether minimizing geodesics exist between all pairs.
    fn is_geodesic(&self) -> bool {
        true
    }

    fn validate_point(&self, p: &Self::Point) -> Result<()>;

    /// Text fields for CSV and CLI output.
    fn encode(&self, p: &Self::Point) -> Vec<String>;

    fn decode(&self, fields: &[&str]) -> Result<Self::Point>;
}

/// Random points for curvature certification.
pub trait SampleFiber: FiberSpace {
    /// A point from a bounded reference region of the fiber.
    fn random_point(&self, rng: &mut dyn RngCore) -> Self::Point;

    /// A point within distance `radius` of `center`.
    fn random_point_near(&self, center: &Self::Point, radius: f64, rng: &mut dyn RngCore) -> Self::Point;
}

pub(crate) fn check_fraction(u: f64) -> Result<()> {
    if (0.0..=1.0).contains(&u) {
        Ok(())
    } else {
        Err(Error::Domain { what: "geodesic fraction", value: u, lo: 0.0, hi: 1.0 })
    }
}

pub(crate) fn parse_f64(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().map_err(|_| Error::InvalidPoint(format!("not a number: {s:?}")))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidPoint(format!("coordinate must be finite: {s:?}")))
    }
}
