use super::{check_fraction, parse_f64, FiberSpace, SampleFiber, TieBreak, TIE_TOLERANCE};
use crate::error::{Error, Result};
use rand::{Rng, RngCore};
use std::f64::consts::{PI, TAU};

fn expect_fields(fields: &[&str], n: usize, what: &str) -> Result<()> {
    if fields.len() == n {
        Ok(())
    } else {
        Err(Error::InvalidPoint(format!("{what} point needs {n} coordinate(s), got {}", fields.len())))
    }
}

/// The real line with `d(x, y) = |x - y|`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RealLine;

impl FiberSpace for RealLine {
    type Point = f64;

    fn name(&self) -> String {
        "R".into()
    }

    fn distance(&self, p: &f64, q: &f64) -> f64 {
        (p - q).abs()
    }

    fn geodesic_point(&self, p: &f64, q: &f64, u: f64) -> Result<f64> {
        check_fraction(u)?;
        Ok(if u == 1.0 { *q } else { p + u * (q - p) })
    }

    fn validate_point(&self, p: &f64) -> Result<()> {
        if p.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidPoint(format!("{p} is not finite")))
        }
    }

    fn encode(&self, p: &f64) -> Vec<String> {
        vec![crate::report::fmt_num(*p)]
    }

    fn decode(&self, fields: &[&str]) -> Result<f64> {
        expect_fields(fields, 1, "R")?;
        parse_f64(fields[0])
    }
}

impl SampleFiber for RealLine {
    fn random_point(&self, rng: &mut dyn RngCore) -> f64 {
        rng.gen_range(-1.0..1.0)
    }

    fn random_point_near(&self, c: &f64, radius: f64, rng: &mut dyn RngCore) -> f64 {
        c + radius * rng.gen_range(-1.0..=1.0)
    }
}

/// Circle of circumference `2 pi r`; points are angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    radius: f64,
    tie_break: TieBreak,
}

impl Circle {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidFiber(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Circle { radius, tie_break: TieBreak::Canonical })
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Signed angular step in `(-pi, pi]` from `p` to `q`.
    fn delta(p: f64, q: f64) -> f64 {
        let d = (q - p).rem_euclid(TAU);
        if d > PI {
            d - TAU
        } else {
            d
        }
    }
}

impl FiberSpace for Circle {
    type Point = f64;

    fn name(&self) -> String {
        format!("S1({})", self.radius)
    }

    fn distance(&self, p: &f64, q: &f64) -> f64 {
        self.radius * Self::delta(*p, *q).abs()
    }

    fn geodesic_point(&self, p: &f64, q: &f64, u: f64) -> Result<f64> {
        check_fraction(u)?;
        let mut d = Self::delta(*p, *q);
        if (d.abs() - PI).abs() <= TIE_TOLERANCE * PI {
            match self.tie_break {
                TieBreak::Reject => {
                    return Err(Error::AmbiguousGeodesic(format!("antipodal angles {p} and {q}")))
                }
                TieBreak::Canonical => d = PI,
                TieBreak::Seeded(s) => d = if s % 2 == 0 { PI } else { -PI },
            }
        }
        Ok(p + u * d)
    }

    fn validate_point(&self, p: &f64) -> Result<()> {
        RealLine.validate_point(p)
    }

    fn encode(&self, p: &f64) -> Vec<String> {
        vec![crate::report::fmt_num(p.rem_euclid(TAU))]
    }

    fn decode(&self, fields: &[&str]) -> Result<f64> {
        expect_fields(fields, 1, "circle")?;
        parse_f64(fields[0])
    }
}

impl SampleFiber for Circle {
    fn random_point(&self, rng: &mut dyn RngCore) -> f64 {
        rng.gen_range(0.0..TAU)
    }

    fn random_point_near(&self, c: &f64, radius: f64, rng: &mut dyn RngCore) -> f64 {
        let r = radius.min(PI * self.radius);
        c + r / self.radius * rng.gen_range(-1.0..=1.0)
    }
}

/// Euclidean space `R^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanN {
    dim: usize,
}

impl EuclideanN {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidFiber("Euclidean dimension must be at least 1".into()));
        }
        Ok(EuclideanN { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl FiberSpace for EuclideanN {
    type Point = Vec<f64>;

    fn name(&self) -> String {
        format!("R^{}", self.dim)
    }

    fn distance(&self, p: &Vec<f64>, q: &Vec<f64>) -> f64 {
        p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    fn geodesic_point(&self, p: &Vec<f64>, q: &Vec<f64>, u: f64) -> Result<Vec<f64>> {
        check_fraction(u)?;
        Ok(p.iter().zip(q).map(|(a, b)| a + u * (b - a)).collect())
    }

    fn validate_point(&self, p: &Vec<f64>) -> Result<()> {
        if p.len() != self.dim {
            return Err(Error::InvalidPoint(format!("expected {} coordinates, got {}", self.dim, p.len())));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPoint("coordinates must be finite".into()));
        }
        Ok(())
    }

    fn encode(&self, p: &Vec<f64>) -> Vec<String> {
        p.iter().map(|x| crate::report::fmt_num(*x)).collect()
    }

    fn decode(&self, fields: &[&str]) -> Result<Vec<f64>> {
        expect_fields(fields, self.dim, "Euclidean")?;
        fields.iter().map(|f| parse_f64(f)).collect()
    }
}

fn random_unit(rng: &mut dyn RngCore, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-3 && norm <= 1.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

impl SampleFiber for EuclideanN {
    fn random_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    fn random_point_near(&self, c: &Vec<f64>, radius: f64, rng: &mut dyn RngCore) -> Vec<f64> {
        let dir = random_unit(rng, self.dim);
        let rho = radius * rng.gen::<f64>();
        c.iter().zip(dir).map(|(a, v)| a + rho * v).collect()
    }
}

pub(crate) type V3 = [f64; 3];

pub(crate) fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: &V3, b: &V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

pub(crate) fn norm(a: &V3) -> f64 {
    dot(a, a).sqrt()
}

fn comb(a: f64, p: &V3, b: f64, q: &V3) -> V3 {
    [a * p[0] + b * q[0], a * p[1] + b * q[1], a * p[2] + b * q[2]]
}

/// Angle between unit vectors, stable near 0 and pi.
pub(crate) fn sphere_angle(p: &V3, q: &V3) -> f64 {
    norm(&cross(p, q)).atan2(dot(p, q))
}

pub(crate) fn sphere_normalize(p: &V3) -> V3 {
    let n = norm(p);
    [p[0] / n, p[1] / n, p[2] / n]
}

/// Unit tangent at `p` in the plane of `p` and `e`.
fn sphere_tangent(p: &V3, e: &V3) -> Option<V3> {
    let v = comb(1.0, e, -dot(e, p), p);
    let n = norm(&v);
    (n > 1e-8).then(|| [v[0] / n, v[1] / n, v[2] / n])
}

pub(crate) fn sphere_exp(p: &V3, v: &V3, angle: f64) -> V3 {
    sphere_normalize(&comb(angle.cos(), p, angle.sin(), v))
}

/// Point at fraction `u` on the unit-sphere geodesic; `None` for antipodes.
pub(crate) fn sphere_interp(p: &V3, q: &V3, u: f64) -> Option<V3> {
    let theta = sphere_angle(p, q);
    if theta < 1e-12 {
        return Some(sphere_normalize(&comb(1.0 - u, p, u, q)));
    }
    if PI - theta <= TIE_TOLERANCE * PI {
        return None;
    }
    let s = theta.sin();
    Some(sphere_normalize(&comb(((1.0 - u) * theta).sin() / s, p, (u * theta).sin() / s, q)))
}

/// Unit-sphere point at geodesic distance `rho` from the north pole in direction `phi`.
pub(crate) fn sphere_polar(rho: f64, phi: f64) -> V3 {
    [rho.sin() * phi.cos(), rho.sin() * phi.sin(), rho.cos()]
}

/// Round sphere of radius `r`; points are unit vectors in `R^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sphere2 {
    radius: f64,
    tie_break: TieBreak,
}

impl Sphere2 {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidFiber(format!("sphere radius must be positive, got {radius}")));
        }
        Ok(Sphere2 { radius, tie_break: TieBreak::Canonical })
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Point from polar angle `theta` and azimuth `phi`.
    pub fn point(theta: f64, phi: f64) -> V3 {
        sphere_polar(theta, phi)
    }

    /// Point at intrinsic distance `rho` from the north pole in direction `phi`.
    pub fn point_polar(&self, rho: f64, phi: f64) -> V3 {
        sphere_polar(rho / self.radius, phi)
    }

    fn antipodal_tangent(&self, p: &V3) -> V3 {
        let mut axis = 0;
        for i in 1..3 {
            if p[i].abs() < p[axis].abs() {
                axis = i;
            }
        }
        let mut e = [0.0; 3];
        e[axis] = 1.0;
        let v = sphere_tangent(p, &e).expect("least aligned axis is not parallel");
        match self.tie_break {
            TieBreak::Seeded(s) => {
                let w = cross(p, &v);
                let ang = (s % 3600) as f64 / 3600.0 * TAU;
                comb(ang.cos(), &v, ang.sin(), &w)
            }
            _ => v,
        }
    }
}

impl FiberSpace for Sphere2 {
    type Point = V3;

    fn name(&self) -> String {
        format!("S2({})", self.radius)
    }

    fn distance(&self, p: &V3, q: &V3) -> f64 {
        self.radius * sphere_angle(p, q)
    }

    fn geodesic_point(&self, p: &V3, q: &V3, u: f64) -> Result<V3> {
        check_fraction(u)?;
        if let Some(x) = sphere_interp(p, q, u) {
            return Ok(x);
        }
        if self.tie_break == TieBreak::Reject {
            return Err(Error::AmbiguousGeodesic("antipodal points on the sphere".into()));
        }
        let v = self.antipodal_tangent(p);
        Ok(if u == 1.0 { *q } else { sphere_exp(p, &v, u * PI) })
    }

    fn validate_point(&self, p: &V3) -> Result<()> {
        if p.iter().any(|x| !x.is_finite()) || (norm(p) - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidPoint(format!("{p:?} is not a unit vector")));
        }
        Ok(())
    }

    fn encode(&self, p: &V3) -> Vec<String> {
        let theta = p[2].clamp(-1.0, 1.0).acos();
        let phi = p[1].atan2(p[0]);
        vec![crate::report::fmt_num(theta), crate::report::fmt_num(phi)]
    }

    /// Two fields are `theta,phi`; three fields are an ambient vector (normalized).
    fn decode(&self, fields: &[&str]) -> Result<V3> {
        match fields.len() {
            2 => Ok(sphere_polar(parse_f64(fields[0])?, parse_f64(fields[1])?)),
            3 => {
                let v = [parse_f64(fields[0])?, parse_f64(fields[1])?, parse_f64(fields[2])?];
                if norm(&v) < 1e-12 {
                    return Err(Error::InvalidPoint("zero vector is not on the sphere".into()));
                }
                Ok(sphere_normalize(&v))
            }
            n => Err(Error::InvalidPoint(format!("sphere point needs 2 or 3 coordinates, got {n}"))),
        }
    }
}

impl SampleFiber for Sphere2 {
    fn random_point(&self, rng: &mut dyn RngCore) -> V3 {
        let v = random_unit(rng, 3);
        [v[0], v[1], v[2]]
    }

    fn random_point_near(&self, c: &V3, radius: f64, rng: &mut dyn RngCore) -> V3 {
        loop {
            let e = random_unit(rng, 3);
            if let Some(v) = sphere_tangent(c, &[e[0], e[1], e[2]]) {
                let angle = (radius / self.radius).min(PI) * rng.gen::<f64>();
                return sphere_exp(c, &v, angle);
            }
        }
    }
}

/// Minkowski bilinear form `-a0 b0 + a1 b1 + a2 b2`.
pub(crate) fn ldot(a: &V3, b: &V3) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Re-projects onto the upper sheet `x0 = sqrt(1 + x1^2 + x2^2)`.
pub(crate) fn hyper_lift(x1: f64, x2: f64) -> V3 {
    [(1.0 + x1 * x1 + x2 * x2).sqrt(), x1, x2]
}

/// Unit-curvature hyperbolic distance, via `2 asinh(|p - q|_L / 2)`.
pub(crate) fn hyper_dist(p: &V3, q: &V3) -> f64 {
    let d = comb(1.0, p, -1.0, q);
    2.0 * (0.5 * ldot(&d, &d).max(0.0).sqrt()).asinh()
}

pub(crate) fn hyper_interp(p: &V3, q: &V3, u: f64) -> V3 {
    let theta = hyper_dist(p, q);
    let x = if theta < 1e-12 {
        comb(1.0 - u, p, u, q)
    } else {
        let s = theta.sinh();
        comb(((1.0 - u) * theta).sinh() / s, p, (u * theta).sinh() / s, q)
    };
    hyper_lift(x[1], x[2])
}

/// Unit tangent vectors at `p`, orthonormal for the Minkowski form.
fn hyper_frame(p: &V3) -> (V3, V3) {
    let proj = |e: &V3| comb(1.0, e, ldot(e, p), p);
    let unit = |v: V3| {
        let n = ldot(&v, &v).sqrt();
        [v[0] / n, v[1] / n, v[2] / n]
    };
    let e1 = unit(proj(&[0.0, 1.0, 0.0]));
    let v2 = proj(&[0.0, 0.0, 1.0]);
    let e2 = unit(comb(1.0, &v2, -ldot(&v2, &e1), &e1));
    (e1, e2)
}

pub(crate) fn hyper_exp(p: &V3, dir: f64, rho: f64) -> V3 {
    let (e1, e2) = hyper_frame(p);
    let v = comb(dir.cos(), &e1, dir.sin(), &e2);
    let x = comb(rho.cosh(), p, rho.sinh(), &v);
    hyper_lift(x[1], x[2])
}

/// Hyperbolic plane of curvature `-1/r^2` in the hyperboloid model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperbolic2 {
    radius: f64,
}

impl Hyperbolic2 {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidFiber(format!("hyperbolic radius must be positive, got {radius}")));
        }
        Ok(Hyperbolic2 { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// The apex `(1, 0, 0)` of the hyperboloid.
    pub fn origin() -> V3 {
        [1.0, 0.0, 0.0]
    }

    /// Point at intrinsic distance `rho` from the apex in direction `phi`.
    pub fn point_polar(&self, rho: f64, phi: f64) -> V3 {
        let s = (rho / self.radius).sinh();
        hyper_lift(s * phi.cos(), s * phi.sin())
    }
}

impl FiberSpace for Hyperbolic2 {
    type Point = V3;

    fn name(&self) -> String {
        format!("H2({})", self.radius)
    }

    fn distance(&self, p: &V3, q: &V3) -> f64 {
        self.radius * hyper_dist(p, q)
    }

    fn geodesic_point(&self, p: &V3, q: &V3, u: f64) -> Result<V3> {
        check_fraction(u)?;
        Ok(if u == 1.0 { *q } else { hyper_interp(p, q, u) })
    }

    fn validate_point(&self, p: &V3) -> Result<()> {
        if p.iter().any(|x| !x.is_finite()) || p[0] <= 0.0 || (ldot(p, p) + 1.0).abs() > 1e-9 * p[0] * p[0] {
            return Err(Error::InvalidPoint(format!("{p:?} is not on the upper hyperboloid sheet")));
        }
        Ok(())
    }

    fn encode(&self, p: &V3) -> Vec<String> {
        vec![crate::report::fmt_num(p[1]), crate::report::fmt_num(p[2])]
    }

    /// Fields are the spatial hyperboloid coordinates `x1,x2`.
    fn decode(&self, fields: &[&str]) -> Result<V3> {
        expect_fields(fields, 2, "hyperbolic")?;
        Ok(hyper_lift(parse_f64(fields[0])?, parse_f64(fields[1])?))
    }
}

impl SampleFiber for Hyperbolic2 {
    fn random_point(&self, rng: &mut dyn RngCore) -> V3 {
        hyper_exp(&Self::origin(), rng.gen_range(0.0..TAU), rng.gen::<f64>())
    }

    fn random_point_near(&self, c: &V3, radius: f64, rng: &mut dyn RngCore) -> V3 {
        hyper_exp(c, rng.gen_range(0.0..TAU), radius / self.radius * rng.gen::<f64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn poles_are_pi_apart() {
        let s = Sphere2::new(1.0).unwrap();
        let (n, so) = ([0.0, 0.0, 1.0], [0.0, 0.0, -1.0]);
        assert!((s.distance(&n, &so) - PI).abs() < 1e-15);
        let mid = s.geodesic_point(&n, &so, 0.5).unwrap();
        assert!(mid[2].abs() < 1e-15);
        let strict = s.with_tie_break(TieBreak::Reject);
        assert!(matches!(strict.geodesic_point(&n, &so, 0.5), Err(Error::AmbiguousGeodesic(_))));
    }

    #[test]
    fn circle_wraps() {
        let c = Circle::new(2.0).unwrap();
        assert!((c.distance(&0.1, &(TAU - 0.1)) - 0.4).abs() < 1e-14);
        let m = c.geodesic_point(&0.1, &(TAU - 0.1), 0.5).unwrap();
        assert!(m.rem_euclid(TAU) < 1e-14 || (m.rem_euclid(TAU) - TAU).abs() < 1e-14);
        assert!(c.with_tie_break(TieBreak::Reject).geodesic_point(&0.0, &PI, 0.3).is_err());
    }

    #[test]
    fn hyperbolic_polar_distance() {
        let h = Hyperbolic2::new(2.0).unwrap();
        let p = h.point_polar(1.5, 0.3);
        assert!((h.distance(&Hyperbolic2::origin(), &p) - 1.5).abs() < 1e-13);
        let q = h.point_polar(0.7, 2.0);
        let m = h.geodesic_point(&p, &q, 0.25).unwrap();
        let d = h.distance(&p, &q);
        assert!((h.distance(&p, &m) - 0.25 * d).abs() < 1e-12);
        assert!((h.distance(&m, &q) - 0.75 * d).abs() < 1e-12);
    }

    #[test]
    fn sphere_geodesic_fractions() {
        let s = Sphere2::new(3.0).unwrap();
        let p = Sphere2::point(0.4, 0.1);
        let q = Sphere2::point(2.0, 1.3);
        let d = s.distance(&p, &q);
        let m = s.geodesic_point(&p, &q, 0.3).unwrap();
        assert!((s.distance(&p, &m) - 0.3 * d).abs() < 1e-12);
    }

    #[test]
    fn sampled_points_stay_in_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = Hyperbolic2::new(1.0).unwrap();
        let s = Sphere2::new(1.0).unwrap();
        let e = EuclideanN::new(3).unwrap();
        for _ in 0..200 {
            let c = h.random_point(&mut rng);
            let p = h.random_point_near(&c, 0.2, &mut rng);
            assert!(h.distance(&c, &p) <= 0.2 + 1e-12);
            h.validate_point(&p).unwrap();
            let c = s.random_point(&mut rng);
            let p = s.random_point_near(&c, 0.2, &mut rng);
            assert!(s.distance(&c, &p) <= 0.2 + 1e-12);
            let c = e.random_point(&mut rng);
            let p = e.random_point_near(&c, 0.2, &mut rng);
            assert!(e.distance(&c, &p) <= 0.2 + 1e-12);
        }
    }

    #[test]
    fn codecs_round_trip() {
        let s = Sphere2::new(1.0).unwrap();
        let p = Sphere2::point(1.1, -0.4);
        let enc = s.encode(&p);
        let back = s.decode(&enc.iter().map(|x| x.as_str()).collect::<Vec<_>>()).unwrap();
        assert!(s.distance(&p, &back) < 1e-8);
        let h = Hyperbolic2::new(1.0).unwrap();
        assert!(h.decode(&["0.5"]).is_err());
        assert!(EuclideanN::new(2).unwrap().decode(&["1", "x"]).is_err());
    }
}
