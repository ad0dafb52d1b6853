//! The Lorentzian model planes `L2(K)` in their warped charts
//! `R x_{f_K} R`: `f_K = 1` for `K = 0`, `cosh(sqrt(K) t)/sqrt(K)` for `K > 0`
//! and `cos(sqrt(-K) t)/sqrt(-K)` on `|t| < pi/(2 sqrt(-K))` for `K < 0`.

use crate::cone::{ConePoint, GeneralizedCone};
use crate::error::{Error, Result};
use crate::fiber::RealLine;
use crate::warp::{Interval, WarpKind, WarpSpec};
use std::f64::consts::{FRAC_PI_2, PI};

/// A chart point `(t, x)` of a model plane.
pub type ModelPoint = ConePoint<f64>;

/// Side of a triangle `x << y << z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    XY,
    YZ,
    XZ,
}

/// A realized comparison triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelTriangle {
    pub k: f64,
    pub x: ModelPoint,
    pub y: ModelPoint,
    pub z: ModelPoint,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Largest mismatch between recomputed and requested side lengths.
    pub residual: f64,
}

/// `L2(K)` with its chart.
#[derive(Debug, Clone)]
pub struct LorentzModel {
    k: f64,
    cone: GeneralizedCone<RealLine>,
}

impl LorentzModel {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::Precondition(format!("curvature must be finite, got {k}")));
        }
        let warp = if k > 0.0 {
            let r = k.sqrt();
            WarpSpec::scaled(WarpKind::Cosh, 1.0 / r, r, Interval::real_line())?
        } else if k < 0.0 {
            let r = (-k).sqrt();
            let h = FRAC_PI_2 / r;
            WarpSpec::scaled(WarpKind::Cos, 1.0 / r, r, Interval::new(-h, h)?)?
        } else {
            WarpSpec::constant(1.0, Interval::real_line())?
        };
        let half = if k < 0.0 { FRAC_PI_2 / (-k).sqrt() } else { 1.0 };
        for t in [-0.3, 0.0, 0.2] {
            let t = t * half;
            let ratio = warp.second_derivative(t)? / warp.value(t)?;
            if (ratio - k).abs() > 1e-9 * k.abs().max(1.0) {
                return Err(Error::InvalidWarp(format!("chart curvature {ratio} differs from {k}")));
            }
        }
        Ok(LorentzModel { k, cone: GeneralizedCone::new(warp, RealLine) })
    }

    pub fn curvature(&self) -> f64 {
        self.k
    }

    /// The chart as a cone over the real line.
    pub fn chart(&self) -> &GeneralizedCone<RealLine> {
        &self.cone
    }

    pub fn point(&self, t: f64, x: f64) -> Result<ModelPoint> {
        self.cone.point(t, x)
    }

    /// Time separation; zero for unrelated pairs.
    pub fn tau(&self, p: &ModelPoint, q: &ModelPoint) -> Result<f64> {
        if self.k == 0.0 {
            let (dt, dx) = (q.t - p.t, (q.x - p.x).abs());
            return Ok(if dt >= dx { (dt * dt - dx * dx).sqrt() } else { 0.0 });
        }
        self.cone.time_separation(p, q)
    }

    /// Point on the maximizer from `p` to `q` at proper time `s` from `p`.
    pub fn geodesic_point(&self, p: &ModelPoint, q: &ModelPoint, s: f64) -> Result<ModelPoint> {
        if self.k == 0.0 {
            let tau = self.tau(p, q)?;
            if !(s >= 0.0 && s <= tau * (1.0 + 1e-12)) || tau == 0.0 {
                return if s == 0.0 { Ok(*p) } else { Err(Error::Domain { what: "proper time", value: s, lo: 0.0, hi: tau }) };
            }
            let u = (s / tau).min(1.0);
            return Ok(ConePoint::new(p.t + u * (q.t - p.t), p.x + u * (q.x - p.x)));
        }
        self.cone.maximizer(p, q)?.point_at_length(s)
    }

    /// Earliest admissible time of the lower vertex for a triangle of height `c`.
    fn base_time(&self, c: f64) -> f64 {
        if self.k < 0.0 {
            let h = FRAC_PI_2 / (-self.k).sqrt();
            if c < 0.9 * h {
                0.0
            } else {
                -0.5 * c
            }
        } else {
            0.0
        }
    }

    /// Places `x' = (t_b, 0)`, `z' = (t_b + c, 0)` and `y'` with `x >= 0` so
    /// that `tau(x', y') = a` and `tau(y', z') = b`; `t_b = 0` unless the
    /// chart is too short.
    pub fn realize_triangle(&self, a: f64, b: f64, c: f64) -> Result<ModelTriangle> {
        if !size_bounds_check(self.k, a, b, c) {
            return Err(Error::SizeBounds { k: self.k, a, b, c });
        }
        let t0 = self.base_time(c);
        let x = ConePoint::new(t0, 0.0);
        let z = ConePoint::new(t0 + c, 0.0);
        let scale = c.max(1e-300);
        let y = if a <= 1e-14 * scale {
            x
        } else if b <= 1e-14 * scale {
            z
        } else if c - a - b <= 1e-13 * scale {
            ConePoint::new(t0 + a, 0.0)
        } else {
            let ch = ((a * a + c * c - b * b) / (2.0 * a * c)).max(1.0);
            let flat = ConePoint::new(t0 + a * ch, a * (ch * ch - 1.0).sqrt());
            if self.k == 0.0 {
                flat
            } else {
                self.newton_vertex(&x, &z, a, b, flat)?
            }
        };
        let residual = (self.tau(&x, &y)? - a).abs().max((self.tau(&y, &z)? - b).abs()).max((self.tau(&x, &z)? - c).abs());
        if residual > 1e-8 * c.max(1.0) {
            return Err(Error::NonConvergence { residual });
        }
        Ok(ModelTriangle { k: self.k, x, y, z, a, b, c, residual })
    }

    /// Damped Newton in `(t, w = x^2)`; `tau` is smooth in `x^2`, so the
    /// system stays regular as the triangle flattens.
    fn newton_vertex(&self, x: &ModelPoint, z: &ModelPoint, a: f64, b: f64, seed: ModelPoint) -> Result<ModelPoint> {
        let eval = |t: f64, w: f64| -> Option<[f64; 2]> {
            let y = ConePoint::new(t, w.max(0.0).sqrt());
            let r1 = self.tau(x, &y).ok()? - a;
            let r2 = self.tau(&y, z).ok()? - b;
            Some([r1, r2])
        };
        let norm = |r: &[f64; 2]| r[0].abs().max(r[1].abs());
        // The flat seed in chart units, pulled toward the axis until both
        // pairs are timelike related.
        let sx = seed.x / self.cone.warp().f(x.t);
        let (mut t, mut w) = (seed.t, sx * sx);
        let mut r = eval(t, w).ok_or_else(|| Error::Precondition("seed vertex outside the chart".into()))?;
        for _ in 0..60 {
            if r[0] > -a && r[1] > -b {
                break;
            }
            w *= 0.25;
            r = eval(t, w).ok_or_else(|| Error::Precondition("seed vertex outside the chart".into()))?;
        }
        let target = 1e-12 * (a + b).max(1e-3);
        let c = z.t - x.t;
        for _ in 0..60 {
            if norm(&r) <= target {
                break;
            }
            let ht = 1e-7 * c;
            let hw = 1e-7 * c * c;
            let rt = eval(t + ht, w).ok_or_else(|| Error::NonConvergence { residual: norm(&r) })?;
            let rw = eval(t, w + hw).ok_or_else(|| Error::NonConvergence { residual: norm(&r) })?;
            let j = [[(rt[0] - r[0]) / ht, (rw[0] - r[0]) / hw], [(rt[1] - r[1]) / ht, (rw[1] - r[1]) / hw]];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if !(det.abs() > 0.0) || !det.is_finite() {
                return Err(Error::NonConvergence { residual: norm(&r) });
            }
            let dt = -(j[1][1] * r[0] - j[0][1] * r[1]) / det;
            let dw = -(-j[1][0] * r[0] + j[0][0] * r[1]) / det;
            let mut lambda = 1.0;
            let mut accepted = false;
            while lambda > 1e-6 {
                let (nt, nw) = (t + lambda * dt, (w + lambda * dw).max(0.0));
                if let Some(nr) = eval(nt, nw) {
                    if norm(&nr) < norm(&r) {
                        t = nt;
                        w = nw;
                        r = nr;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if norm(&r) > 1e-9 * c.max(1.0) {
            return Err(Error::NonConvergence { residual: norm(&r) });
        }
        Ok(ConePoint::new(t, w.sqrt()))
    }

    /// The point on `side` at proper time `s` from the side's first vertex.
    pub fn corresponding_point(&self, tri: &ModelTriangle, side: Side, s: f64) -> Result<ModelPoint> {
        let (p, q, len) = match side {
            Side::XY => (&tri.x, &tri.y, tri.a),
            Side::YZ => (&tri.y, &tri.z, tri.b),
            Side::XZ => (&tri.x, &tri.z, tri.c),
        };
        let slack = 1e-12 * len.max(1.0);
        if !(s >= -slack && s <= len + slack) {
            return Err(Error::Domain { what: "side parameter", value: s, lo: 0.0, hi: len });
        }
        let s = s.clamp(0.0, len);
        if s == 0.0 {
            return Ok(*p);
        }
        if s == len {
            return Ok(*q);
        }
        if p.x == q.x {
            return Ok(ConePoint::new(p.t + s, p.x));
        }
        self.geodesic_point(p, q, s)
    }
}

/// Time separation in `L2(K)` between chart points.
pub fn model_tau(k: f64, p: &ModelPoint, q: &ModelPoint) -> Result<f64> {
    LorentzModel::new(k)?.tau(p, q)
}

/// Size bounds: `c >= a + b`, and `c < pi/sqrt|K|` when `c = a + b, K > 0`
/// or `c > a + b, K < 0`.
pub fn size_bounds_check(k: f64, a: f64, b: f64, c: f64) -> bool {
    if !(a >= 0.0 && b >= 0.0 && c.is_finite() && a.is_finite() && b.is_finite()) {
        return false;
    }
    let band = 1e-12 * c.abs().max(1.0);
    if c < a + b - band {
        return false;
    }
    let equal = (c - a - b).abs() <= band;
    if (equal && k > 0.0) || (!equal && k < 0.0) {
        return c < PI / k.abs().sqrt();
    }
    true
}

/// Modified distance `h_K(E) = (1 - cos sqrt(K E))/K` with `cos(i y) = cosh y`
/// and `h_0(E) = E/2`.
pub fn modified_distance(k: f64, e: f64) -> f64 {
    let z = k * e;
    if z.abs() < 1e-6 {
        // sum_{n>=1} (-K)^{n-1} E^n / (2n)!
        let mut term = e / 2.0;
        let mut sum = term;
        for n in 2..8 {
            term *= -z / ((2 * n - 1) * (2 * n)) as f64;
            sum += term;
        }
        return sum;
    }
    if z > 0.0 {
        (1.0 - z.sqrt().cos()) / k
    } else {
        (1.0 - (-z).sqrt().cosh()) / k
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_triangle_examples() {
        let m = LorentzModel::new(0.0).unwrap();
        let t = m.realize_triangle(1.0, 1.0, 2.5).unwrap();
        assert!((t.y.t - 1.25).abs() < 1e-12 && (t.y.x - 0.75).abs() < 1e-12);
        let t = m.realize_triangle(1.0, 1.0, 2.0).unwrap();
        assert_eq!((t.y.t, t.y.x), (1.0, 0.0));
        let mid = m.corresponding_point(&t, Side::XZ, 1.0).unwrap();
        assert_eq!((mid.t, mid.x), (1.0, 0.0));
        let t = m.realize_triangle(1.0, 1.0, 2.5).unwrap();
        assert_eq!(m.corresponding_point(&t, Side::YZ, 1.0).unwrap(), t.z);
        assert_eq!(m.corresponding_point(&t, Side::XY, 0.0).unwrap(), t.x);
    }

    #[test]
    fn curved_triangles_residual() {
        for &k in &[-1.0, 1.0, -4.0, 0.5] {
            let m = LorentzModel::new(k).unwrap();
            for &(a, b, c) in &[(0.3, 0.4, 0.8), (0.1, 0.1, 0.2000001), (0.05, 0.3, 0.5)] {
                let t = m.realize_triangle(a, b, c).unwrap();
                assert!(t.residual < 1e-8, "K={k} {a} {b} {c}: {}", t.residual);
                assert!(t.y.x >= 0.0);
            }
        }
    }

    #[test]
    fn vertical_model_tau() {
        for &k in &[-1.0, 0.0, 2.0] {
            let p = ConePoint::new(0.1, 0.4);
            let q = ConePoint::new(0.9, 0.4);
            assert!((model_tau(k, &p, &q).unwrap() - 0.8).abs() < 1e-13);
        }
        assert_eq!(model_tau(0.0, &ConePoint::new(0.0, 0.0), &ConePoint::new(2.0, 1.0)).unwrap(), 3f64.sqrt());
    }

    #[test]
    fn size_bounds() {
        assert!(size_bounds_check(0.0, 1.0, 1.0, 3.0));
        assert!(!size_bounds_check(-1.0, 1.0, 1.0, PI + 0.1));
        assert!(size_bounds_check(1.0, 1.0, 1.0, 2.0));
        assert!(!size_bounds_check(1.0, 2.0, 2.0, 4.0));
        assert!(!size_bounds_check(0.0, 1.0, 1.0, 1.5));
    }

    #[test]
    fn modified_distance_values() {
        assert_eq!(modified_distance(1.0, 0.0), 0.0);
        assert_eq!(modified_distance(0.0, -4.0), -2.0);
        assert!((modified_distance(-1.0, -4.0) - (2f64.cos() - 1.0)).abs() < 1e-15);
        for &(k, e) in &[(-1.0f64, 0.99e-6f64), (1.0, 0.99e-6), (-1.0, -0.99e-6), (1.0, -0.99e-6)] {
            let z = k * e;
            let closed = if z > 0.0 { (1.0 - z.sqrt().cos()) / k } else { (1.0 - (-z).sqrt().cosh()) / k };
            assert!((modified_distance(k, e) - closed).abs() < 1e-9 * closed.abs());
        }
    }
}
