use super::{
    Circle, EuclideanN, FiberSpace, GraphPoint, Hyperbolic2, MetricGraph, ModelSurface, RealLine, SampleFiber, Sphere2,
};
use crate::error::{Error, Result};
use rand::RngCore;

/// Runtime choice among the built-in fibers (used by configuration files).
#[derive(Debug, Clone, PartialEq)]
pub enum AnyFiber {
    Real(RealLine),
    Circle(Circle),
    Euclidean(EuclideanN),
    Sphere(Sphere2),
    Hyperbolic(Hyperbolic2),
    Graph(MetricGraph),
    Model(ModelSurface),
}

/// Point of an [`AnyFiber`].
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPoint {
    Scalar(f64),
    Vector(Vec<f64>),
    Ambient([f64; 3]),
    Graph(GraphPoint),
}

macro_rules! dispatch {
    ($self:expr, $f:ident => $body:expr) => {
        match $self {
            AnyFiber::Real($f) => $body,
            AnyFiber::Circle($f) => $body,
            AnyFiber::Euclidean($f) => $body,
            AnyFiber::Sphere($f) => $body,
            AnyFiber::Hyperbolic($f) => $body,
            AnyFiber::Graph($f) => $body,
            AnyFiber::Model($f) => $body,
        }
    };
}

fn mismatch(fiber: &AnyFiber, p: &AnyPoint) -> Error {
    Error::InvalidPoint(format!("{p:?} is not a point of {}", fiber.name()))
}

impl AnyFiber {
    fn scalar(&self, p: &AnyPoint) -> Result<f64> {
        match p {
            AnyPoint::Scalar(x) => Ok(*x),
            _ => Err(mismatch(self, p)),
        }
    }

    fn vector(&self, p: &AnyPoint) -> Result<Vec<f64>> {
        match p {
            AnyPoint::Vector(x) => Ok(x.clone()),
            _ => Err(mismatch(self, p)),
        }
    }

    fn ambient(&self, p: &AnyPoint) -> Result<[f64; 3]> {
        match p {
            AnyPoint::Ambient(x) => Ok(*x),
            _ => Err(mismatch(self, p)),
        }
    }

    fn graph(&self, p: &AnyPoint) -> Result<GraphPoint> {
        match p {
            AnyPoint::Graph(x) => Ok(*x),
            _ => Err(mismatch(self, p)),
        }
    }
}

impl FiberSpace for AnyFiber {
    type Point = AnyPoint;

    fn name(&self) -> String {
        dispatch!(self, f => f.name())
    }

    /// Panics when the points do not belong to this fiber; points obtained
    /// from [`FiberSpace::decode`] or the sampler always do.
    fn distance(&self, p: &AnyPoint, q: &AnyPoint) -> f64 {
        use AnyPoint::*;
        match (self, p, q) {
            (AnyFiber::Real(f), Scalar(a), Scalar(b)) => f.distance(a, b),
            (AnyFiber::Circle(f), Scalar(a), Scalar(b)) => f.distance(a, b),
            (AnyFiber::Euclidean(f), Vector(a), Vector(b)) => f.distance(a, b),
            (AnyFiber::Sphere(f), Ambient(a), Ambient(b)) => f.distance(a, b),
            (AnyFiber::Hyperbolic(f), Ambient(a), Ambient(b)) => f.distance(a, b),
            (AnyFiber::Model(f), Ambient(a), Ambient(b)) => f.distance(a, b),
            (AnyFiber::Graph(f), Graph(a), Graph(b)) => f.distance(a, b),
            _ => panic!("{}", mismatch(self, p)),
        }
    }

    fn geodesic_point(&self, p: &AnyPoint, q: &AnyPoint, u: f64) -> Result<AnyPoint> {
        use AnyPoint::*;
        Ok(match (self, p, q) {
            (AnyFiber::Real(f), Scalar(a), Scalar(b)) => Scalar(f.geodesic_point(a, b, u)?),
            (AnyFiber::Circle(f), Scalar(a), Scalar(b)) => Scalar(f.geodesic_point(a, b, u)?),
            (AnyFiber::Euclidean(f), Vector(a), Vector(b)) => Vector(f.geodesic_point(a, b, u)?),
            (AnyFiber::Sphere(f), Ambient(a), Ambient(b)) => Ambient(f.geodesic_point(a, b, u)?),
            (AnyFiber::Hyperbolic(f), Ambient(a), Ambient(b)) => Ambient(f.geodesic_point(a, b, u)?),
            (AnyFiber::Model(f), Ambient(a), Ambient(b)) => Ambient(f.geodesic_point(a, b, u)?),
            (AnyFiber::Graph(f), Graph(a), Graph(b)) => Graph(f.geodesic_point(a, b, u)?),
            _ => return Err(mismatch(self, if self.validate_point(p).is_err() { p } else { q })),
        })
    }

    fn validate_point(&self, p: &AnyPoint) -> Result<()> {
        match self {
            AnyFiber::Real(f) => f.validate_point(&self.scalar(p)?),
            AnyFiber::Circle(f) => f.validate_point(&self.scalar(p)?),
            AnyFiber::Euclidean(f) => f.validate_point(&self.vector(p)?),
            AnyFiber::Sphere(f) => f.validate_point(&self.ambient(p)?),
            AnyFiber::Hyperbolic(f) => f.validate_point(&self.ambient(p)?),
            AnyFiber::Model(f) => f.validate_point(&self.ambient(p)?),
            AnyFiber::Graph(f) => f.validate_point(&self.graph(p)?),
        }
    }

    fn encode(&self, p: &AnyPoint) -> Vec<String> {
        match (self, p) {
            (AnyFiber::Real(f), AnyPoint::Scalar(x)) => f.encode(x),
            (AnyFiber::Circle(f), AnyPoint::Scalar(x)) => f.encode(x),
            (AnyFiber::Euclidean(f), AnyPoint::Vector(x)) => f.encode(x),
            (AnyFiber::Sphere(f), AnyPoint::Ambient(x)) => f.encode(x),
            (AnyFiber::Hyperbolic(f), AnyPoint::Ambient(x)) => f.encode(x),
            (AnyFiber::Model(f), AnyPoint::Ambient(x)) => f.encode(x),
            (AnyFiber::Graph(f), AnyPoint::Graph(x)) => f.encode(x),
            _ => panic!("{}", mismatch(self, p)),
        }
    }

    fn decode(&self, fields: &[&str]) -> Result<AnyPoint> {
        Ok(match self {
            AnyFiber::Real(f) => AnyPoint::Scalar(f.decode(fields)?),
            AnyFiber::Circle(f) => AnyPoint::Scalar(f.decode(fields)?),
            AnyFiber::Euclidean(f) => AnyPoint::Vector(f.decode(fields)?),
            AnyFiber::Sphere(f) => AnyPoint::Ambient(f.decode(fields)?),
            AnyFiber::Hyperbolic(f) => AnyPoint::Ambient(f.decode(fields)?),
            AnyFiber::Model(f) => AnyPoint::Ambient(f.decode(fields)?),
            AnyFiber::Graph(f) => AnyPoint::Graph(f.decode(fields)?),
        })
    }
}

impl SampleFiber for AnyFiber {
    fn random_point(&self, rng: &mut dyn RngCore) -> AnyPoint {
        match self {
            AnyFiber::Real(f) => AnyPoint::Scalar(f.random_point(rng)),
            AnyFiber::Circle(f) => AnyPoint::Scalar(f.random_point(rng)),
            AnyFiber::Euclidean(f) => AnyPoint::Vector(f.random_point(rng)),
            AnyFiber::Sphere(f) => AnyPoint::Ambient(f.random_point(rng)),
            AnyFiber::Hyperbolic(f) => AnyPoint::Ambient(f.random_point(rng)),
            AnyFiber::Model(f) => AnyPoint::Ambient(f.random_point(rng)),
            AnyFiber::Graph(f) => AnyPoint::Graph(f.random_point(rng)),
        }
    }

    fn random_point_near(&self, c: &AnyPoint, radius: f64, rng: &mut dyn RngCore) -> AnyPoint {
        match (self, c) {
            (AnyFiber::Real(f), AnyPoint::Scalar(x)) => AnyPoint::Scalar(f.random_point_near(x, radius, rng)),
            (AnyFiber::Circle(f), AnyPoint::Scalar(x)) => AnyPoint::Scalar(f.random_point_near(x, radius, rng)),
            (AnyFiber::Euclidean(f), AnyPoint::Vector(x)) => AnyPoint::Vector(f.random_point_near(x, radius, rng)),
            (AnyFiber::Sphere(f), AnyPoint::Ambient(x)) => AnyPoint::Ambient(f.random_point_near(x, radius, rng)),
            (AnyFiber::Hyperbolic(f), AnyPoint::Ambient(x)) => AnyPoint::Ambient(f.random_point_near(x, radius, rng)),
            (AnyFiber::Model(f), AnyPoint::Ambient(x)) => AnyPoint::Ambient(f.random_point_near(x, radius, rng)),
            (AnyFiber::Graph(f), AnyPoint::Graph(x)) => AnyPoint::Graph(f.random_point_near(x, radius, rng)),
            _ => panic!("{}", mismatch(self, c)),
        }
    }
}
