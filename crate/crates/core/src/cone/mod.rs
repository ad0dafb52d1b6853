//! The generalized cone `Y = I x_f X`: causal relations, time separation,
//! maximizing geodesics and functionals of sampled causal paths.
//!
//! Every pair computation reduces to the one-dimensional profile
//! `(p0, q0, d(p, q))`. A maximizer moves along a fiber geodesic with
//! `f^2 beta' / sqrt(1 - f^2 beta'^2) = kappa` constant, so
//! `beta' = kappa / (f sqrt(f^2 + kappa^2))` and
//! `tau = \int f / sqrt(f^2 + kappa^2) dt`.

mod path;

pub use path::{CausalPath, DiamondBox, DiamondSlice, PathClass};

use crate::error::{Error, Result};
use crate::fiber::FiberSpace;
use crate::numeric::{self, QuadTol};
use crate::warp::WarpSpec;

/// A point `(t, x)` of the cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConePoint<P> {
    pub t: f64,
    pub x: P,
}

impl<P> ConePoint<P> {
    pub fn new(t: f64, x: P) -> Self {
        ConePoint { t, x }
    }
}

/// Numerical tolerances of a cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeTolerances {
    pub quad: QuadTol,
    /// `q0 = h_{p0}(d)` is accepted within `null * max(1, |q0|)`.
    pub null: f64,
    /// Relative slack in the segment certificate `m d <= dt`.
    pub causal_slack: f64,
    /// Relative band on the null-reach defect used by [`GeneralizedCone::classify_path`].
    pub classify: f64,
}

impl Default for ConeTolerances {
    fn default() -> Self {
        ConeTolerances { quad: QuadTol::tight(), null: 1e-9, causal_slack: 1e-9, classify: 1e-7 }
    }
}

/// Causal relation of `q` relative to `p` (future direction).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Equal,
    Chronological,
    NullBoundary,
    NotRelated,
}

impl Relation {
    pub fn name(&self) -> &'static str {
        match self {
            Relation::Equal => "equal",
            Relation::Chronological => "chronological",
            Relation::NullBoundary => "null_boundary",
            Relation::NotRelated => "not_related",
        }
    }

    pub fn is_causal(&self) -> bool {
        !matches!(self, Relation::NotRelated)
    }
}

/// Relation with the data that decided it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationVerdict {
    pub relation: Relation,
    pub fiber_distance: f64,
    /// Forward horizon `b_{p0}`; infinite when the reach integral diverges.
    pub horizon: f64,
    /// `h_{p0}(d)` when `d < b_{p0}`.
    pub null_time: Option<f64>,
}

/// Shape of the maximizer between two related points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    Equal,
    /// Same fiber point: the maximizer is the vertical line.
    Vertical,
    /// Interior of the cone: momentum `kappa > 0`.
    Timelike { kappa: f64 },
    /// On the null boundary: `beta' = 1/f`.
    Null,
    Unrelated,
}

/// Solution of the one-dimensional profile problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Profile {
    pub t0: f64,
    pub t1: f64,
    pub d: f64,
    pub tau: f64,
    pub kind: ProfileKind,
}

/// The warped product `I x_f X`.
#[derive(Debug, Clone)]
pub struct GeneralizedCone<X: FiberSpace> {
    warp: WarpSpec,
    fiber: X,
    tol: ConeTolerances,
}

impl<X: FiberSpace> GeneralizedCone<X> {
    pub fn new(warp: WarpSpec, fiber: X) -> Self {
        GeneralizedCone { warp, fiber, tol: ConeTolerances::default() }
    }

    pub fn with_tolerances(mut self, tol: ConeTolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn warp(&self) -> &WarpSpec {
        &self.warp
    }

    pub fn fiber(&self) -> &X {
        &self.fiber
    }

    pub fn tolerances(&self) -> &ConeTolerances {
        &self.tol
    }

    /// Validated point constructor.
    pub fn point(&self, t: f64, x: X::Point) -> Result<ConePoint<X::Point>> {
        self.warp.value(t)?;
        self.fiber.validate_point(&x)?;
        Ok(ConePoint { t, x })
    }

    fn check(&self, p: &ConePoint<X::Point>) -> Result<()> {
        self.warp.value(p.t)?;
        Ok(())
    }

    /// Decides whether `q` lies in the causal future of `p`: chronological when
    /// `d(p, q) < b_{p0}` and `q0 > h_{p0}(d)`, null when `q0 = h_{p0}(d)`.
    pub fn relate(&self, p: &ConePoint<X::Point>, q: &ConePoint<X::Point>) -> Result<RelationVerdict> {
        self.check(p)?;
        self.check(q)?;
        let d = self.fiber.distance(&p.x, &q.x);
        let nt = self.warp.null_transport(p.t)?;
        let horizon = nt.forward_horizon();
        let mut verdict = RelationVerdict { relation: Relation::NotRelated, fiber_distance: d, horizon, null_time: None };
        if d == 0.0 && q.t == p.t {
            verdict.relation = Relation::Equal;
            verdict.null_time = Some(p.t);
            return Ok(verdict);
        }
        if d >= horizon {
            return Ok(verdict);
        }
        let h = nt.solve(d)?;
        verdict.null_time = Some(h);
        let band = self.tol.null * q.t.abs().max(1.0);
        verdict.relation = if (q.t - h).abs() <= band {
            if !self.fiber.is_geodesic() {
                return Err(Error::Indeterminate(
                    "null boundary case needs a minimizing fiber geodesic, and the fiber is not geodesic".into(),
                ));
            }
            Relation::NullBoundary
        } else if q.t > h {
            Relation::Chronological
        } else {
            Relation::NotRelated
        };
        Ok(verdict)
    }

    /// One-dimensional problem: maximal length from `(t0, .)` to `(t1, .)`
    /// across fiber distance `d`.
    pub fn tau_profile(&self, t0: f64, t1: f64, d: f64) -> Result<Profile> {
        let mut prof = Profile { t0, t1, d, tau: 0.0, kind: ProfileKind::Unrelated };
        if !(d >= 0.0) {
            return Err(Error::Precondition(format!("fiber distance must be non-negative, got {d}")));
        }
        if t1 < t0 || (t1 == t0 && d > 0.0) {
            return Ok(prof);
        }
        if d == 0.0 {
            if t1 == t0 {
                prof.kind = ProfileKind::Equal;
            } else {
                prof.kind = ProfileKind::Vertical;
                prof.tau = t1 - t0;
            }
            return Ok(prof);
        }
        let reach = self.warp.null_reach(t0, t1, self.tol.quad)?;
        // |q0 - h(d)| ~ f(q0) |reach - d| near the boundary.
        if self.warp.f(t1) * (reach - d).abs() <= self.tol.null * t1.abs().max(1.0) {
            if !self.fiber.is_geodesic() {
                return Err(Error::Indeterminate("null boundary case on a non-geodesic fiber".into()));
            }
            prof.kind = ProfileKind::Null;
            return Ok(prof);
        }
        if d > reach {
            return Ok(prof);
        }
        if !self.fiber.is_geodesic() {
            return Err(Error::NonGeodesicFiber);
        }
        let kappa = self.solve_kappa(t0, t1, d)?;
        prof.tau = self.tau_integral(t0, t1, kappa)?;
        prof.kind = ProfileKind::Timelike { kappa };
        Ok(prof)
    }

    fn drift(&self, t0: f64, t1: f64, kappa: f64) -> Result<f64> {
        let w = &self.warp;
        numeric::integrate(
            |t| {
                let f = w.f(t);
                kappa / (f * f.hypot(kappa))
            },
            t0,
            t1,
            self.tol.quad,
        )
    }

    fn tau_integral(&self, t0: f64, t1: f64, kappa: f64) -> Result<f64> {
        let w = &self.warp;
        numeric::integrate(
            |t| {
                let f = w.f(t);
                f / f.hypot(kappa)
            },
            t0,
            t1,
            self.tol.quad,
        )
    }

    /// Momentum `kappa` with `\int kappa / (f sqrt(f^2 + kappa^2)) = d`.
    fn solve_kappa(&self, t0: f64, t1: f64, d: f64) -> Result<f64> {
        let mut hi = self.warp.max_on(t0, t1) * d / (t1 - t0);
        hi = hi.max(1e-300);
        let mut steps = 0;
        while self.drift(t0, t1, hi)? < d {
            hi *= 4.0;
            steps += 1;
            if steps > 600 || !hi.is_finite() {
                return Err(Error::Root(format!("no momentum bracket for d = {d} on [{t0}, {t1}]")));
            }
        }
        let mut err = None;
        let k = numeric::brent(
            |k| match self.drift(t0, t1, k) {
                Ok(v) => v - d,
                Err(e) => {
                    err = Some(e);
                    f64::NAN
                }
            },
            0.0,
            hi,
            0.0,
            300,
        );
        if let Some(e) = err {
            return Err(e);
        }
        k
    }

    /// `tau(p, q)`: zero unless `q` is in the causal future of `p`.
    pub fn time_separation(&self, p: &ConePoint<X::Point>, q: &ConePoint<X::Point>) -> Result<f64> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.tau_profile(p.t, q.t, self.fiber.distance(&p.x, &q.x))?.tau)
    }

    /// The maximizing causal curve from `p` to `q`.
    pub fn maximizer(&self, p: &ConePoint<X::Point>, q: &ConePoint<X::Point>) -> Result<Maximizer<'_, X>> {
        self.check(p)?;
        self.check(q)?;
        let profile = self.tau_profile(p.t, q.t, self.fiber.distance(&p.x, &q.x))?;
        if profile.kind == ProfileKind::Unrelated {
            return Err(Error::Precondition("the points are not causally related".into()));
        }
        Ok(Maximizer { cone: self, p: p.clone(), q: q.clone(), profile })
    }

    /// Maximizer sampled at `n` equally spaced times.
    pub fn maximizing_geodesic(
        &self,
        p: &ConePoint<X::Point>,
        q: &ConePoint<X::Point>,
        n: usize,
    ) -> Result<CausalPath<X::Point>> {
        self.maximizer(p, q)?.sample(n)
    }
}

/// Closed form on the Minkowski cone `(0, inf) x_id X`:
/// `sqrt(s^2 + t^2 - 2 s t cosh d)` for `s <= t` and `d` inside the null cone.
pub fn minkowski_tau(s: f64, t: f64, d: f64) -> f64 {
    if t < s || d >= (t / s).ln() {
        return 0.0;
    }
    (s * s + t * t - 2.0 * s * t * d.cosh()).max(0.0).sqrt()
}

/// A maximizing causal curve, evaluated lazily.
#[derive(Debug, Clone)]
pub struct Maximizer<'c, X: FiberSpace> {
    cone: &'c GeneralizedCone<X>,
    p: ConePoint<X::Point>,
    q: ConePoint<X::Point>,
    profile: Profile,
}

impl<'c, X: FiberSpace> Maximizer<'c, X> {
    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn tau(&self) -> f64 {
        self.profile.tau
    }

    /// Conserved momentum `f^2 |beta'|` per unit proper time; zero on vertical lines.
    pub fn kappa(&self) -> Option<f64> {
        match self.profile.kind {
            ProfileKind::Timelike { kappa } => Some(kappa),
            ProfileKind::Vertical | ProfileKind::Equal => Some(0.0),
            _ => None,
        }
    }

    /// Fiber distance covered by time `t`.
    fn covered(&self, t0: f64, t: f64) -> Result<f64> {
        let c = self.cone;
        match self.profile.kind {
            ProfileKind::Timelike { kappa } => c.drift(t0, t, kappa),
            ProfileKind::Null => c.warp.null_reach(t0, t, c.tol.quad),
            _ => Ok(0.0),
        }
    }

    fn at_fraction(&self, t: f64, u: f64) -> Result<ConePoint<X::Point>> {
        let x = if u <= 0.0 {
            self.p.x.clone()
        } else if u >= 1.0 {
            self.q.x.clone()
        } else {
            self.cone.fiber.geodesic_point(&self.p.x, &self.q.x, u)?
        };
        Ok(ConePoint { t, x })
    }

    fn fraction(&self, covered: f64) -> f64 {
        if self.profile.d > 0.0 {
            (covered / self.profile.d).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    /// Point of the maximizer at time `t` in `[p0, q0]`.
    pub fn point_at_time(&self, t: f64) -> Result<ConePoint<X::Point>> {
        let (t0, t1) = (self.profile.t0, self.profile.t1);
        if !(t >= t0 && t <= t1) {
            return Err(Error::Domain { what: "t", value: t, lo: t0, hi: t1 });
        }
        if t == t1 {
            return Ok(self.q.clone());
        }
        let u = self.fraction(self.covered(t0, t)?);
        self.at_fraction(t, u)
    }

    /// Point at proper time `s` in `[0, tau]` from `p`.
    pub fn point_at_length(&self, s: f64) -> Result<ConePoint<X::Point>> {
        let tau = self.profile.tau;
        let slack = 1e-12 * tau.max(1.0);
        if !(s >= -slack && s <= tau + slack) {
            return Err(Error::Domain { what: "proper time", value: s, lo: 0.0, hi: tau });
        }
        let (t0, t1) = (self.profile.t0, self.profile.t1);
        match self.profile.kind {
            ProfileKind::Vertical => self.point_at_time((t0 + s).min(t1)),
            ProfileKind::Equal => Ok(self.p.clone()),
            ProfileKind::Timelike { kappa } => {
                if s <= 0.0 {
                    return Ok(self.p.clone());
                }
                if s >= tau {
                    return Ok(self.q.clone());
                }
                let c = self.cone;
                let w = &c.warp;
                let t = numeric::newton_bracketed(
                    |t| Ok(c.tau_integral(t0, t, kappa)? - s),
                    |t| {
                        let f = w.f(t);
                        f / f.hypot(kappa)
                    },
                    t0,
                    t1,
                    1e-15,
                )?;
                self.point_at_time(t)
            }
            _ => Err(Error::Precondition("null curves have no proper-time parametrization".into())),
        }
    }

    /// Point whose fiber component is at fraction `u` of the fiber geodesic.
    pub fn point_at_fiber_fraction(&self, u: f64) -> Result<ConePoint<X::Point>> {
        crate::fiber::check_fraction(u)?;
        let (t0, t1) = (self.profile.t0, self.profile.t1);
        if self.profile.d == 0.0 {
            return Err(Error::Precondition("the maximizer is vertical".into()));
        }
        let target = u * self.profile.d;
        let kappa = self.kappa();
        let w = &self.cone.warp;
        let t = if u == 0.0 {
            t0
        } else if u == 1.0 {
            t1
        } else {
            numeric::newton_bracketed(
                |t| Ok(self.covered(t0, t)? - target),
                |t| {
                    let f = w.f(t);
                    match kappa {
                        Some(k) => k / (f * f.hypot(k)),
                        None => 1.0 / f,
                    }
                },
                t0,
                t1,
                1e-15,
            )?
        };
        self.at_fraction(t, u)
    }

    /// The maximizer sampled at `n >= 2` equally spaced times.
    pub fn sample(&self, n: usize) -> Result<CausalPath<X::Point>> {
        if n < 2 {
            return Err(Error::Precondition("a sampled path needs at least two points".into()));
        }
        let (t0, t1) = (self.profile.t0, self.profile.t1);
        if self.profile.kind == ProfileKind::Equal {
            return Err(Error::Precondition("the endpoints coincide".into()));
        }
        let mut pts = Vec::with_capacity(n);
        pts.push(self.p.clone());
        let mut covered = 0.0;
        let mut prev = t0;
        for i in 1..n - 1 {
            let t = t0 + (t1 - t0) * i as f64 / (n - 1) as f64;
            covered += self.covered(prev, t)?;
            prev = t;
            pts.push(self.at_fraction(t, self.fraction(covered))?);
        }
        pts.push(self.q.clone());
        CausalPath::new(pts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::{RealLine, Sphere2};
    use crate::warp::{Interval, WarpKind};

    fn flat() -> GeneralizedCone<RealLine> {
        GeneralizedCone::new(WarpSpec::constant(1.0, Interval::real_line()).unwrap(), RealLine)
    }

    #[test]
    fn flat_separation() {
        let c = flat();
        let tau = c.time_separation(&ConePoint::new(0.0, 0.0), &ConePoint::new(2.0, 1.0)).unwrap();
        assert!((tau - 3f64.sqrt()).abs() < 1e-12);
        let v = c.relate(&ConePoint::new(0.0, 0.0), &ConePoint::new(2.0, 1.0)).unwrap();
        assert_eq!(v.relation, Relation::Chronological);
        let v = c.relate(&ConePoint::new(0.0, 0.0), &ConePoint::new(1.0, 1.0)).unwrap();
        assert_eq!(v.relation, Relation::NullBoundary);
        let v = c.relate(&ConePoint::new(0.0, 0.0), &ConePoint::new(1.0, 1.5)).unwrap();
        assert_eq!(v.relation, Relation::NotRelated);
    }

    #[test]
    fn vertical_and_equal() {
        let c = flat();
        let p = ConePoint::new(0.5, 3.0);
        assert_eq!(c.time_separation(&p, &ConePoint::new(2.0, 3.0)).unwrap(), 1.5);
        assert_eq!(c.relate(&p, &p).unwrap().relation, Relation::Equal);
        assert_eq!(c.time_separation(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn exp_null_time_matches_transport() {
        let w = WarpSpec::new(WarpKind::Exp, Interval::real_line()).unwrap();
        let c = GeneralizedCone::new(w, RealLine);
        let v = c.relate(&ConePoint::new(0.0, 0.0), &ConePoint::new(2.0, 0.5)).unwrap();
        assert_eq!(v.relation, Relation::Chronological);
        // h_0(d) = -ln(1 - d).
        assert!((v.null_time.unwrap() + (0.5f64).ln()).abs() < 1e-12);
        assert!((v.horizon - 1.0).abs() < 1e-9);
        let v = c.relate(&ConePoint::new(0.0, 0.0), &ConePoint::new(5.0, 1.2)).unwrap();
        assert_eq!(v.relation, Relation::NotRelated);
    }

    #[test]
    fn sphere_minkowski_cone() {
        let w = WarpSpec::new(WarpKind::Identity, Interval::positive()).unwrap();
        let s = Sphere2::new(1.0).unwrap();
        let c = GeneralizedCone::new(w, s);
        let p = ConePoint::new(1.0, Sphere2::point(0.2, 0.0));
        let q = ConePoint::new(2.5, Sphere2::point(0.7, 0.4));
        let d = s.distance(&p.x, &q.x);
        let expect = (1.0 + 6.25 - 5.0 * d.cosh()).sqrt();
        assert!((c.time_separation(&p, &q).unwrap() - expect).abs() < 1e-10);
    }

    #[test]
    fn proper_time_points() {
        let w = WarpSpec::new(WarpKind::Cosh, Interval::real_line()).unwrap();
        let c = GeneralizedCone::new(w, RealLine);
        let (p, q) = (ConePoint::new(-0.3, 0.0), ConePoint::new(0.9, 0.6));
        let m = c.maximizer(&p, &q).unwrap();
        let tau = m.tau();
        let mid = m.point_at_length(0.4 * tau).unwrap();
        assert!((c.time_separation(&p, &mid).unwrap() - 0.4 * tau).abs() < 1e-10);
        assert!((c.time_separation(&mid, &q).unwrap() - 0.6 * tau).abs() < 1e-10);
        let h = m.point_at_fiber_fraction(0.5).unwrap();
        assert!((h.x - 0.3).abs() < 1e-12);
        let s = c.time_separation(&p, &h).unwrap() + c.time_separation(&h, &q).unwrap();
        assert!((s - tau).abs() < 1e-10);
    }
}
