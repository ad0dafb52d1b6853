//! JSON cone configurations.
//!
//! ```json
//! {
//!   "interval": {"a": "-inf", "b": "inf"},
//!   "warp": {"kind": "cosh", "amplitude": 1, "rate": 1},
//!   "fiber": {"kind": "sphere", "radius": 1},
//!   "tolerances": {"null": 1e-9, "comparison": 1e-5},
//!   "sampling": {"window": [-1, 1], "fiber_scale": 0.1},
//!   "seed": 7
//! }
//! ```
//!
//! Warp kinds: `constant {c}`, `identity`, `sin`, `cos`, `cosh`, `sinh`,
//! `exp` (each with optional `amplitude` and `rate`), `power {p}` (optional
//! `amplitude`) and `sampled {t, f, interp}` with `interp` `linear` or
//! `spline`. Fiber kinds: `real`, `circle {radius}`, `euclidean {n}`,
//! `sphere {radius}`, `hyperbolic {radius}`, `graph {edge_list}`,
//! `tripod {leg}` and `model {K}`.

use crate::comparison::Sampling;
use crate::cone::{ConeTolerances, GeneralizedCone};
use crate::error::{Error, Result};
use crate::fiber::{AnyFiber, Circle, EuclideanN, Hyperbolic2, MetricGraph, ModelSurface, RealLine, Sphere2};
use crate::numeric::QuadTol;
use crate::warp::{Interpolation, Interval, Sampled, WarpKind, WarpSpec};
use serde::Deserialize;

/// The cone type built from a configuration.
pub type Cone = GeneralizedCone<AnyFiber>;

/// An interval endpoint: a number or one of `"inf"`, `"-inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "EndpointRepr")]
pub struct Endpoint(pub f64);

#[derive(Deserialize)]
#[serde(untagged)]
enum EndpointRepr {
    Number(f64),
    Text(String),
}

impl TryFrom<EndpointRepr> for Endpoint {
    type Error = String;

    fn try_from(r: EndpointRepr) -> std::result::Result<Self, String> {
        match r {
            EndpointRepr::Number(x) => Ok(Endpoint(x)),
            EndpointRepr::Text(s) => match s.trim() {
                "inf" | "+inf" => Ok(Endpoint(f64::INFINITY)),
                "-inf" => Ok(Endpoint(f64::NEG_INFINITY)),
                _ => Err(format!("expected a number, \"inf\" or \"-inf\", got {s:?}")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntervalConfig {
    pub a: Endpoint,
    pub b: Endpoint,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum WarpConfig {
    Constant {
        c: f64,
    },
    Identity {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        rate: f64,
    },
    Sin {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        rate: f64,
    },
    Cos {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        rate: f64,
    },
    Cosh {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        rate: f64,
    },
    Sinh {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        rate: f64,
    },
    Exp {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one")]
        rate: f64,
    },
    Power {
        p: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    Sampled {
        t: Vec<f64>,
        f: Vec<f64>,
        #[serde(default)]
        interp: InterpConfig,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpConfig {
    #[default]
    Linear,
    Spline,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FiberConfig {
    Real,
    Circle {
        #[serde(default = "one")]
        radius: f64,
    },
    Euclidean {
        n: usize,
    },
    Sphere {
        #[serde(default = "one")]
        radius: f64,
    },
    Hyperbolic {
        #[serde(default = "one")]
        radius: f64,
    },
    Graph {
        edge_list: String,
    },
    Tripod {
        leg: f64,
    },
    Model {
        #[serde(rename = "K", alias = "k")]
        k: f64,
    },
}

/// Optional overrides of the numerical tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub quad_abs: Option<f64>,
    pub quad_rel: Option<f64>,
    pub null: Option<f64>,
    pub causal_slack: Option<f64>,
    pub classify: Option<f64>,
    /// Relative gap tolerance of curvature certification.
    pub comparison: Option<f64>,
}

/// Optional defaults for curvature certification.
#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    /// Base-time window for triangle centres.
    pub window: Option<(f64, f64)>,
    /// Fiber size as a fraction of the lifting bound.
    pub fiber_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeConfig {
    pub interval: IntervalConfig,
    pub warp: WarpConfig,
    pub fiber: FiberConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub seed: u64,
}

/// Parses and validates a JSON document; errors name the offending field.
pub fn parse_config(text: &str) -> Result<ConeConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: ConeConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::Config(format!("{path}: {inner}"))
    })?;
    cfg.build()?;
    Ok(cfg)
}

fn field<T>(path: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Config(format!("{path}: {e}")))
}

impl ConeConfig {
    pub fn interval(&self) -> Result<Interval> {
        field("interval", Interval::new(self.interval.a.0, self.interval.b.0))
    }

    pub fn warp_spec(&self) -> Result<WarpSpec> {
        let iv = self.interval()?;
        let (kind, amplitude, rate) = match &self.warp {
            WarpConfig::Constant { c } => (WarpKind::Constant, *c, 1.0),
            WarpConfig::Identity { amplitude, rate } => (WarpKind::Identity, *amplitude, *rate),
            WarpConfig::Sin { amplitude, rate } => (WarpKind::Sin, *amplitude, *rate),
            WarpConfig::Cos { amplitude, rate } => (WarpKind::Cos, *amplitude, *rate),
            WarpConfig::Cosh { amplitude, rate } => (WarpKind::Cosh, *amplitude, *rate),
            WarpConfig::Sinh { amplitude, rate } => (WarpKind::Sinh, *amplitude, *rate),
            WarpConfig::Exp { amplitude, rate } => (WarpKind::Exp, *amplitude, *rate),
            WarpConfig::Power { p, amplitude } => (WarpKind::Power(*p), *amplitude, 1.0),
            WarpConfig::Sampled { t, f, interp } => {
                let interp = match interp {
                    InterpConfig::Linear => Interpolation::Linear,
                    InterpConfig::Spline => Interpolation::Spline,
                };
                let s = field("warp", Sampled::new(t.clone(), f.clone(), interp))?;
                (WarpKind::Sampled(s), 1.0, 1.0)
            }
        };
        field("warp", WarpSpec::scaled(kind, amplitude, rate, iv))
    }

    pub fn fiber(&self) -> Result<AnyFiber> {
        let f = match &self.fiber {
            FiberConfig::Real => Ok(AnyFiber::Real(RealLine)),
            FiberConfig::Circle { radius } => Circle::new(*radius).map(AnyFiber::Circle),
            FiberConfig::Euclidean { n } => EuclideanN::new(*n).map(AnyFiber::Euclidean),
            FiberConfig::Sphere { radius } => Sphere2::new(*radius).map(AnyFiber::Sphere),
            FiberConfig::Hyperbolic { radius } => Hyperbolic2::new(*radius).map(AnyFiber::Hyperbolic),
            FiberConfig::Graph { edge_list } => MetricGraph::parse_edge_list(edge_list).map(AnyFiber::Graph),
            FiberConfig::Tripod { leg } => MetricGraph::tripod(*leg).map(AnyFiber::Graph),
            FiberConfig::Model { k } => ModelSurface::new(*k).map(AnyFiber::Model),
        };
        field("fiber", f)
    }

    pub fn cone_tolerances(&self) -> Result<ConeTolerances> {
        let t = &self.tolerances;
        let d = ConeTolerances::default();
        let pick = |name: &str, v: Option<f64>, default: f64| -> Result<f64> {
            match v {
                Some(x) if !(x > 0.0 && x.is_finite()) => {
                    Err(Error::Config(format!("tolerances.{name}: must be positive, got {x}")))
                }
                Some(x) => Ok(x),
                None => Ok(default),
            }
        };
        Ok(ConeTolerances {
            quad: QuadTol {
                abs: pick("quad_abs", t.quad_abs, d.quad.abs)?,
                rel: pick("quad_rel", t.quad_rel, d.quad.rel)?,
                max_segments: d.quad.max_segments,
            },
            null: pick("null", t.null, d.null)?,
            causal_slack: pick("causal_slack", t.causal_slack, d.causal_slack)?,
            classify: pick("classify", t.classify, d.classify)?,
        })
    }

    /// Certification sampling with this config's seed, tolerance and overrides.
    pub fn sampling(&self) -> Sampling {
        let mut s = Sampling { seed: self.seed, ..Sampling::default() };
        if let Some(tol) = self.tolerances.comparison {
            s.tolerance = tol;
        }
        s.t_window = self.sampling.window;
        if let Some(f) = self.sampling.fiber_scale {
            s.fiber_scale = f;
        }
        s
    }

    fn check_sampling(&self) -> Result<()> {
        if let Some((lo, hi)) = self.sampling.window {
            let iv = self.interval()?;
            if !(lo < hi && iv.contains(lo) && iv.contains(hi)) {
                return Err(Error::Config(format!("sampling.window: ({lo}, {hi}) is not a subinterval of the warp interval")));
            }
        }
        if let Some(f) = self.sampling.fiber_scale {
            if !(f > 0.0 && f <= 1.0) {
                return Err(Error::Config(format!("sampling.fiber_scale: must lie in (0, 1], got {f}")));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Cone> {
        self.check_sampling()?;
        Ok(GeneralizedCone::new(self.warp_spec()?, self.fiber()?).with_tolerances(self.cone_tolerances()?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_flat() {
        let c = parse_config(r#"{"interval":{"a":"-inf","b":"inf"},"warp":{"kind":"constant","c":1},"fiber":{"kind":"euclidean","n":2}}"#)
            .unwrap();
        assert_eq!(c.interval().unwrap(), Interval::real_line());
        assert!(c.warp_spec().unwrap().is_constant());
        assert_eq!(c.seed, 0);
    }

    #[test]
    fn sin_past_pi_is_rejected() {
        let e = parse_config(r#"{"interval":{"a":0,"b":7},"warp":{"kind":"sin"},"fiber":{"kind":"real"}}"#).unwrap_err();
        assert!(e.to_string().contains("warp"), "{e}");
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let e = parse_config(
            r#"{"interval":{"a":"-inf","b":"inf"},"warp":{"kind":"constant","c":1},
                "fiber":{"kind":"graph","edge_list":"a b 1\nc d 1"}}"#,
        )
        .unwrap_err();
        assert!(e.to_string().contains("disconnected"), "{e}");
    }

    #[test]
    fn unknown_fields_carry_their_path() {
        let e = parse_config(r#"{"interval":{"a":0,"b":1},"warp":{"kind":"exp","rat":2},"fiber":{"kind":"real"}}"#).unwrap_err();
        let s = e.to_string();
        assert!(s.contains("warp") && s.contains("rat"), "{s}");
        let e = parse_config(r#"{"interval":{"a":"infinity","b":1},"warp":{"kind":"exp"},"fiber":{"kind":"real"}}"#).unwrap_err();
        assert!(e.to_string().contains("interval.a"), "{e}");
    }

    #[test]
    fn model_and_tolerances() {
        let c = parse_config(
            r#"{"interval":{"a":0,"b":"inf"},"warp":{"kind":"power","p":0.5},"fiber":{"kind":"model","K":-1},
                "tolerances":{"null":1e-8,"comparison":1e-4},"sampling":{"window":[0.5,2],"fiber_scale":1},"seed":9}"#,
        )
        .unwrap();
        assert_eq!(c.cone_tolerances().unwrap().null, 1e-8);
        assert_eq!(c.sampling().tolerance, 1e-4);
        assert_eq!(c.sampling().seed, 9);
        assert_eq!(c.sampling().t_window, Some((0.5, 2.0)));
        assert_eq!(c.sampling().fiber_scale, 1.0);
        let e = parse_config(r#"{"interval":{"a":0,"b":1},"warp":{"kind":"exp"},"fiber":{"kind":"real"},"sampling":{"window":[0.5,2]}}"#)
            .unwrap_err();
        assert!(e.to_string().contains("sampling.window"), "{e}");
        assert!(matches!(c.fiber().unwrap(), AnyFiber::Model(_)));
    }
}
