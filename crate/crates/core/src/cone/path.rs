//! Sampled causal paths and their length functionals.
//!
//! A sampled path is the piecewise curve that moves linearly in `t` and at
//! constant speed along a fiber geodesic between consecutive samples.

use super::{ConePoint, GeneralizedCone};
use crate::error::{Error, Result};
use crate::fiber::FiberSpace;
use crate::report::{csv_row, fmt_num};

/// A path parametrized by base time: strictly increasing `t_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalPath<P> {
    samples: Vec<ConePoint<P>>,
    params: Option<Vec<f64>>,
}

impl<P: Clone> CausalPath<P> {
    pub fn new(samples: Vec<ConePoint<P>>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::Precondition("a path needs at least two samples".into()));
        }
        for w in samples.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::Precondition(format!(
                    "sample times must increase strictly ({} then {})",
                    w[0].t, w[1].t
                )));
            }
        }
        Ok(CausalPath { samples, params: None })
    }

    /// A path with its own parameter values `s_i`. Times may run in either
    /// direction; a past-directed path is reversed and its parameter negated.
    pub fn with_parameters(mut samples: Vec<ConePoint<P>>, mut params: Vec<f64>) -> Result<Self> {
        if params.len() != samples.len() {
            return Err(Error::Precondition("one parameter value per sample is required".into()));
        }
        if params.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("parameter values must increase strictly".into()));
        }
        if samples.len() >= 2 && samples[1].t < samples[0].t {
            samples.reverse();
            params.reverse();
            params.iter_mut().for_each(|s| *s = -*s);
        }
        let mut path = Self::new(samples)?;
        path.params = Some(params);
        Ok(path)
    }

    pub fn samples(&self) -> &[ConePoint<P>] {
        &self.samples
    }

    pub fn parameters(&self) -> Option<&[f64]> {
        self.params.as_deref()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> &ConePoint<P> {
        &self.samples[0]
    }

    pub fn last(&self) -> &ConePoint<P> {
        &self.samples[self.samples.len() - 1]
    }

    /// Replaces the parametrization, keeping the samples.
    pub fn reparametrized(&self, params: Vec<f64>) -> Result<Self> {
        Self::with_parameters(self.samples.clone(), params)
    }

    /// Joins two paths sharing an endpoint. Parameters are dropped.
    pub fn concat(&self, other: &Self) -> Result<Self>
    where
        P: PartialEq,
    {
        if self.last() != other.first() {
            return Err(Error::Precondition("paths do not share an endpoint".into()));
        }
        let mut s = self.samples.clone();
        s.extend(other.samples[1..].iter().cloned());
        Self::new(s)
    }
}

/// Causal character of a sampled path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathClass {
    Timelike,
    Null,
    CausalMixed,
    NotCausal,
}

impl PathClass {
    pub fn name(&self) -> &'static str {
        match self {
            PathClass::Timelike => "timelike",
            PathClass::Null => "null",
            PathClass::CausalMixed => "causal_mixed",
            PathClass::NotCausal => "not_causal",
        }
    }
}

/// Fiber ball radii bounding one slice `{t} x X` of a causal diamond.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiamondSlice {
    pub t: f64,
    /// Radius of the ball around `p̄`.
    pub from_past: f64,
    /// Radius of the ball around `q̄`.
    pub to_future: f64,
}

/// Sampled outer bound of `J(p, q)`; empty when `q` is not in `J+(p)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiamondBox {
    pub t_range: Option<(f64, f64)>,
    pub slices: Vec<DiamondSlice>,
}

impl<X: FiberSpace> GeneralizedCone<X> {
    fn segments<'a>(&'a self, path: &'a CausalPath<X::Point>) -> impl Iterator<Item = (f64, f64, f64)> + 'a {
        path.samples.windows(2).map(move |w| (w[0].t, w[1].t, self.fiber.distance(&w[0].x, &w[1].x)))
    }

    /// Checks `m_{t_i, t_{i+1}} d_i <= dt_i` on every segment.
    pub fn certify(&self, path: &CausalPath<X::Point>) -> Result<()> {
        for (i, (s, t, d)) in self.segments(path).enumerate() {
            self.warp.value(s)?;
            self.warp.value(t)?;
            let m = self.warp.min_on(s, t);
            if m * d > (t - s) * (1.0 + self.tol.causal_slack) {
                return Err(Error::NotCausal(format!(
                    "segment {i} on [{s}, {t}]: m d = {} exceeds dt = {}",
                    m * d,
                    t - s
                )));
            }
        }
        Ok(())
    }

    /// Midpoint-rule length `sum sqrt(dt^2 - f(mid)^2 d^2)`.
    pub fn path_length(&self, path: &CausalPath<X::Point>) -> Result<f64> {
        self.certify(path)?;
        Ok(self
            .segments(path)
            .map(|(s, t, d)| {
                let f = self.warp.f(0.5 * (s + t));
                ((t - s).powi(2) - f * f * d * d).max(0.0).sqrt()
            })
            .sum())
    }

    /// Values of `sum sqrt(dt^2 - m^2 d^2)` over the dyadic refinements
    /// `0..=depth` of the sample partition; non-increasing in the depth.
    pub fn variational_length(&self, path: &CausalPath<X::Point>, depth: u32) -> Result<Vec<f64>> {
        self.certify(path)?;
        let segs: Vec<_> = self.segments(path).collect();
        Ok((0..=depth)
            .map(|k| {
                let n = 1u64 << k;
                segs.iter()
                    .map(|&(s, t, d)| {
                        let (h, dd) = ((t - s) / n as f64, d / n as f64);
                        (0..n)
                            .map(|j| {
                                let a = s + h * j as f64;
                                let b = if j + 1 == n { t } else { a + h };
                                let m = self.warp.min_on(a, b);
                                (h * h - m * m * dd * dd).max(0.0).sqrt()
                            })
                            .sum::<f64>()
                    })
                    .sum()
            })
            .collect())
    }

    /// `T(p, q) = sqrt(max(0, (q0 - p0)^2 - m_{p0,q0}^2 d^2))`, zero for `q0 < p0`.
    pub fn segment_tau_bound(&self, p: &ConePoint<X::Point>, q: &ConePoint<X::Point>) -> Result<f64> {
        self.warp.value(p.t)?;
        self.warp.value(q.t)?;
        if q.t < p.t {
            return Ok(0.0);
        }
        let m = self.warp.min_on(p.t, q.t);
        let d = self.fiber.distance(&p.x, &q.x);
        Ok(((q.t - p.t).powi(2) - m * m * d * d).max(0.0).sqrt())
    }

    /// Classifies each segment by its null-reach defect
    /// `1 - d_i / \int_{t_i}^{t_{i+1}} 1/f`: positive is timelike, zero null.
    pub fn classify_path(&self, path: &CausalPath<X::Point>) -> Result<PathClass> {
        let (mut timelike, mut null) = (0usize, 0usize);
        for (s, t, d) in self.segments(path) {
            self.warp.value(s)?;
            self.warp.value(t)?;
            let reach = self.warp.null_reach(s, t, self.tol.quad)?;
            let defect = 1.0 - d / reach;
            if defect > self.tol.classify {
                timelike += 1;
            } else if defect >= -self.tol.classify {
                null += 1;
            } else {
                return Ok(PathClass::NotCausal);
            }
        }
        Ok(match (timelike, null) {
            (_, 0) => PathClass::Timelike,
            (0, _) => PathClass::Null,
            _ => PathClass::CausalMixed,
        })
    }

    /// `1/2 sum (dt^2 - f(mid)^2 d^2) / ds` over the path's parameter
    /// (sample index when none is attached).
    pub fn energy(&self, path: &CausalPath<X::Point>) -> Result<f64> {
        let params: Vec<f64> = match &path.params {
            Some(p) => p.clone(),
            None => (0..path.len()).map(|i| i as f64).collect(),
        };
        Ok(self
            .segments(path)
            .zip(params.windows(2))
            .map(|((s, t, d), w)| {
                let f = self.warp.f(0.5 * (s + t));
                0.5 * ((t - s).powi(2) - f * f * d * d) / (w[1] - w[0])
            })
            .sum())
    }

    /// Per-segment estimate of the conserved momentum `f^2 v_beta` with respect
    /// to proper time; constant along maximizers.
    pub fn momentum_profile(&self, path: &CausalPath<X::Point>) -> Vec<f64> {
        self.segments(path)
            .map(|(s, t, d)| {
                let f = self.warp.f(0.5 * (s + t));
                let l = ((t - s).powi(2) - f * f * d * d).max(0.0).sqrt();
                f * f * d / l
            })
            .collect()
    }

    /// Sampled bounding box of `J(p, q)` at `n` equally spaced times.
    pub fn causal_diamond_box(&self, p: &ConePoint<X::Point>, q: &ConePoint<X::Point>, n: usize) -> Result<DiamondBox> {
        let rel = self.relate(p, q)?;
        if !rel.relation.is_causal() {
            return Ok(DiamondBox { t_range: None, slices: vec![] });
        }
        if q.t == p.t {
            return Ok(DiamondBox {
                t_range: Some((p.t, p.t)),
                slices: vec![DiamondSlice { t: p.t, from_past: 0.0, to_future: 0.0 }],
            });
        }
        let n = n.max(2);
        let slices = (0..n)
            .map(|i| {
                let t = p.t + (q.t - p.t) * i as f64 / (n - 1) as f64;
                self.diamond_slice(p.t, q.t, t)
            })
            .collect();
        Ok(DiamondBox { t_range: Some((p.t, q.t)), slices })
    }

    fn diamond_slice(&self, p0: f64, q0: f64, t: f64) -> DiamondSlice {
        let from_past = if t > p0 { (t - p0) / self.warp.min_on(p0, t) } else { 0.0 };
        let to_future = if t < q0 { (q0 - t) / self.warp.min_on(t, q0) } else { 0.0 };
        DiamondSlice { t, from_past, to_future }
    }

    /// Whether `r` lies in the bounding box of `J(p, q)` (with relative slack).
    pub fn in_diamond_box(&self, p: &ConePoint<X::Point>, q: &ConePoint<X::Point>, r: &ConePoint<X::Point>) -> bool {
        if r.t < p.t || r.t > q.t {
            return false;
        }
        let s = self.diamond_slice(p.t, q.t, r.t);
        let slack = 1e-9;
        self.fiber.distance(&p.x, &r.x) <= s.from_past * (1.0 + slack) + slack
            && self.fiber.distance(&r.x, &q.x) <= s.to_future * (1.0 + slack) + slack
    }

    /// CSV rows `t,<fiber fields>` (with a leading `s` column when the path
    /// carries parameters).
    pub fn path_to_csv(&self, path: &CausalPath<X::Point>) -> String {
        let mut out = String::new();
        let has_params = path.params.is_some();
        let mut header = Vec::new();
        if has_params {
            header.push("s".to_string());
        }
        header.push("t".to_string());
        let width = self.fiber.encode(&path.samples[0].x).len();
        if width == 1 {
            header.push("x".into());
        } else {
            header.extend((1..=width).map(|i| format!("x{i}")));
        }
        out.push_str(&csv_row(&header));
        out.push('\n');
        for (i, p) in path.samples.iter().enumerate() {
            let mut row = Vec::new();
            if let Some(ps) = &path.params {
                row.push(fmt_num(ps[i]));
            }
            row.push(fmt_num(p.t));
            row.extend(self.fiber.encode(&p.x));
            out.push_str(&csv_row(&row));
            out.push('\n');
        }
        out
    }

    /// Parses the output of [`GeneralizedCone::path_to_csv`].
    pub fn path_from_csv(&self, text: &str) -> Result<CausalPath<X::Point>> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Precondition("empty path file".into()))?;
        let has_params = header.split(',').next().map(str::trim) == Some("s");
        let (mut pts, mut params) = (Vec::new(), Vec::new());
        for (i, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let num = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| Error::Precondition(format!("row {}: not a number: {s:?}", i + 1)))
            };
            let skip = usize::from(has_params);
            if fields.len() < skip + 2 {
                return Err(Error::Precondition(format!("row {}: too few fields", i + 1)));
            }
            if has_params {
                params.push(num(fields[0])?);
            }
            let t = num(fields[skip])?;
            let x = self.fiber.decode(&fields[skip + 1..])?;
            pts.push(self.point(t, x)?);
        }
        if has_params {
            CausalPath::with_parameters(pts, params)
        } else {
            CausalPath::new(pts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::RealLine;
    use crate::warp::{Interval, WarpKind, WarpSpec};

    fn flat() -> GeneralizedCone<RealLine> {
        GeneralizedCone::new(WarpSpec::constant(1.0, Interval::real_line()).unwrap(), RealLine)
    }

    fn line(pts: &[(f64, f64)]) -> CausalPath<f64> {
        CausalPath::new(pts.iter().map(|&(t, x)| ConePoint::new(t, x)).collect()).unwrap()
    }

    #[test]
    fn flat_lengths() {
        let c = flat();
        let g = c.maximizing_geodesic(&ConePoint::new(0.0, 0.0), &ConePoint::new(2.0, 1.0), 11).unwrap();
        for s in g.samples() {
            assert!((s.x - s.t / 2.0).abs() < 1e-12);
        }
        assert!((c.path_length(&g).unwrap() - 3f64.sqrt()).abs() < 1e-12);
        assert_eq!(c.classify_path(&g).unwrap(), PathClass::Timelike);
        let v = c.variational_length(&line(&[(0.0, 0.0), (2.0, 1.0)]), 4).unwrap();
        assert!(v.iter().all(|x| (x - 3f64.sqrt()).abs() < 1e-12));
    }

    #[test]
    fn null_and_vertical() {
        let c = flat();
        let null = c.maximizing_geodesic(&ConePoint::new(0.0, 0.0), &ConePoint::new(1.0, 1.0), 5).unwrap();
        assert_eq!(c.path_length(&null).unwrap(), 0.0);
        assert_eq!(c.classify_path(&null).unwrap(), PathClass::Null);
        assert_eq!(c.energy(&null).unwrap(), 0.0);
        let v = line(&[(0.0, 2.0), (1.7, 2.0)]);
        assert!((c.path_length(&v).unwrap() - 1.7).abs() < 1e-15);
        let mixed = line(&[(0.0, 0.0), (1.0, 0.0), (2.0, 1.0)]);
        assert_eq!(c.classify_path(&mixed).unwrap(), PathClass::CausalMixed);
        let bad = line(&[(0.0, 0.0), (1.0, 2.0)]);
        assert_eq!(c.classify_path(&bad).unwrap(), PathClass::NotCausal);
        assert!(matches!(c.path_length(&bad), Err(Error::NotCausal(_))));
    }

    #[test]
    fn diamond_box() {
        let c = flat();
        let b = c.causal_diamond_box(&ConePoint::new(0.0, 0.0), &ConePoint::new(2.0, 0.0), 3).unwrap();
        assert_eq!(b.slices[1], DiamondSlice { t: 1.0, from_past: 1.0, to_future: 1.0 });
        let p = ConePoint::new(0.0, 0.0);
        let e = c.causal_diamond_box(&p, &p, 3).unwrap();
        assert_eq!(e.slices.len(), 1);
        let none = c.causal_diamond_box(&p, &ConePoint::new(1.0, 3.0), 3).unwrap();
        assert!(none.slices.is_empty() && none.t_range.is_none());
    }

    #[test]
    fn sin_variational_converges() {
        let w = WarpSpec::new(WarpKind::Sin, Interval::new(0.0, std::f64::consts::PI).unwrap()).unwrap();
        let c = GeneralizedCone::new(w, RealLine);
        let g = c.maximizing_geodesic(&ConePoint::new(0.4, 0.0), &ConePoint::new(2.6, 0.9), 9).unwrap();
        let seq = c.variational_length(&g, 8).unwrap();
        assert!(seq.windows(2).all(|w| w[1] < w[0]));
        let l = c.path_length(&g).unwrap();
        assert!((seq[8] - l).abs() < 1e-3);
    }

    #[test]
    fn csv_round_trip() {
        let c = flat();
        let g = line(&[(0.0, 0.0), (1.0, 0.25), (2.0, 0.5)]).reparametrized(vec![0.0, 0.3, 1.0]).unwrap();
        let back = c.path_from_csv(&c.path_to_csv(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn reversed_input_is_normalized() {
        let pts = vec![ConePoint::new(2.0, 1.0), ConePoint::new(1.0, 0.5), ConePoint::new(0.0, 0.0)];
        let p = CausalPath::with_parameters(pts, vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(p.first().t, 0.0);
        assert_eq!(p.parameters().unwrap(), &[-2.0, -1.0, 0.0]);
    }
}
