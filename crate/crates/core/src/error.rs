use thiserror::Error;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} lies outside ({lo}, {hi})")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("invalid warp: {0}")]
    InvalidWarp(String),
    #[error("invalid fiber: {0}")]
    InvalidFiber(String),
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("warp has no second derivative: {0}")]
    NoDerivative(String),
    #[error("quadrature did not converge on [{a}, {b}] (estimate {value:e}, error {error:e})")]
    Quadrature { a: f64, b: f64, value: f64, error: f64 },
    #[error("root search failed: {0}")]
    Root(String),
    #[error("{value} is outside the range ({lo}, {hi})")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("path is not causal: {0}")]
    NotCausal(String),
    #[error("fiber is not a geodesic space")]
    NonGeodesicFiber,
    #[error("ambiguous geodesic: {0}")]
    AmbiguousGeodesic(String),
    #[error("indeterminate: {0}")]
    Indeterminate(String),
    #[error("triangle inequality fails for sides {0}, {1}, {2}")]
    TriangleInequality(f64, f64, f64),
    #[error("size bounds fail for K = {k}: a = {a}, b = {b}, c = {c}")]
    SizeBounds { k: f64, a: f64, b: f64, c: f64 },
    #[error("realization did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("sampling exhausted: {accepted} of {attempts} attempts usable")]
    SamplingExhausted { attempts: usize, accepted: usize },
    #[error("catalog: {0}")]
    Catalog(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
