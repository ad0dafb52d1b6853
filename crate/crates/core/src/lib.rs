//! Numerics for generalized cones `Y = I x_f X`: a warping function `f` on an
//! open interval `I`, a metric length space `X`, and the Lorentzian structure
//! `-dt^2 + f(t)^2 dX^2` between them.
//!
//! - [`warp`]: warping functions, null transport and horizons, concavity and
//!   singularity reports.
//! - [`fiber`]: built-in fibers (line, circle, `R^n`, sphere, hyperbolic plane,
//!   metric graphs, model surfaces).
//! - [`cone`]: causal relations, time separation, maximizers and functionals of
//!   sampled causal paths.
//! - [`lorentz_model`]: the Lorentzian model planes and comparison triangles.
//! - [`comparison`]: sampled timelike curvature certification.
//! - [`llstructure`]: finite length structures from curve catalogs.
//! - [`config`] and [`cli`]: JSON configurations and the `lorcone` binary.
//! - [`oracle`] and [`acceptance`]: brute-force references and the acceptance suite.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod cli;
pub mod comparison;
pub mod config;
pub mod cone;
pub mod error;
pub mod fiber;
pub mod llstructure;
pub mod lorentz_model;
pub mod numeric;
pub mod oracle;
pub mod report;
pub mod warp;

pub use error::{Error, Result};
