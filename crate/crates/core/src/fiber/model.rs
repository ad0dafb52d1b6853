use super::smooth::{hyper_dist, hyper_exp, hyper_interp, sphere_angle, sphere_interp, sphere_normalize, sphere_polar, V3};
use super::{check_fraction, parse_f64, FiberSpace, SampleFiber};
use crate::error::{Error, Result};
use rand::{Rng, RngCore};
use std::f64::consts::{PI, TAU};

/// The simply connected model surface of constant curvature `K`.
///
/// Points are stored in ambient coordinates: unit sphere vectors (`K > 0`),
/// unit hyperboloid vectors (`K < 0`) or `(x, y, 0)` (`K = 0`); distances are
/// rescaled by `1/sqrt|K|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSurface {
    k: f64,
}

impl ModelSurface {
    pub fn new(k: f64) -> Result<Self> {
        if !k.is_finite() {
            return Err(Error::InvalidFiber(format!("curvature must be finite, got {k}")));
        }
        Ok(ModelSurface { k })
    }

    pub fn curvature(&self) -> f64 {
        self.k
    }

    fn scale(&self) -> f64 {
        if self.k == 0.0 {
            1.0
        } else {
            1.0 / self.k.abs().sqrt()
        }
    }

    /// Base point of the polar chart.
    pub fn origin(&self) -> V3 {
        self.polar(0.0, 0.0)
    }

    /// Point at distance `rho` from the origin in direction `phi`.
    pub fn polar(&self, rho: f64, phi: f64) -> V3 {
        let r = self.scale();
        if self.k > 0.0 {
            sphere_polar(rho / r, phi)
        } else if self.k < 0.0 {
            let s = (rho / r).sinh();
            super::smooth::hyper_lift(s * phi.cos(), s * phi.sin())
        } else {
            [rho * phi.cos(), rho * phi.sin(), 0.0]
        }
    }

    /// Angle at the vertex between sides `a` and `b` opposite the side `c`,
    /// from the half-angle form of the law of cosines.
    fn angle(&self, a: f64, b: f64, c: f64) -> f64 {
        if a == 0.0 || b == 0.0 {
            return 0.0;
        }
        let kk = self.k.abs().sqrt();
        let s2 = if self.k > 0.0 {
            let h = |x: f64| (0.5 * kk * x).sin().powi(2);
            (h(c) - h(a - b)) / ((kk * a).sin() * (kk * b).sin())
        } else if self.k < 0.0 {
            let h = |x: f64| (0.5 * kk * x).sinh().powi(2);
            (h(c) - h(a - b)) / ((kk * a).sinh() * (kk * b).sinh())
        } else {
            (0.25 * c * c - 0.25 * (a - b) * (a - b)) / (a * b)
        };
        2.0 * s2.clamp(0.0, 1.0).sqrt().asin()
    }
}

impl FiberSpace for ModelSurface {
    type Point = V3;

    fn name(&self) -> String {
        format!("M2({})", self.k)
    }

    fn distance(&self, p: &V3, q: &V3) -> f64 {
        let r = self.scale();
        if self.k > 0.0 {
            r * sphere_angle(p, q)
        } else if self.k < 0.0 {
            r * hyper_dist(p, q)
        } else {
            ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
        }
    }

    fn geodesic_point(&self, p: &V3, q: &V3, u: f64) -> Result<V3> {
        check_fraction(u)?;
        if u == 1.0 {
            return Ok(*q);
        }
        if self.k > 0.0 {
            sphere_interp(p, q, u).ok_or_else(|| Error::AmbiguousGeodesic("antipodal points on the model sphere".into()))
        } else if self.k < 0.0 {
            Ok(hyper_interp(p, q, u))
        } else {
            Ok([p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1]), 0.0])
        }
    }

    fn validate_point(&self, p: &V3) -> Result<()> {
        let ok = if self.k > 0.0 {
            (super::smooth::norm(p) - 1.0).abs() <= 1e-9
        } else if self.k < 0.0 {
            p[0] > 0.0 && (super::smooth::ldot(p, p) + 1.0).abs() <= 1e-9 * p[0] * p[0]
        } else {
            p[2] == 0.0
        };
        if ok && p.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidPoint(format!("{p:?} is not on the model surface of curvature {}", self.k)))
        }
    }

    fn encode(&self, p: &V3) -> Vec<String> {
        p.iter().map(|x| crate::report::fmt_num(*x)).collect()
    }

    fn decode(&self, fields: &[&str]) -> Result<V3> {
        if fields.len() != 3 {
            return Err(Error::InvalidPoint("model surface points have 3 ambient coordinates".into()));
        }
        let v = [parse_f64(fields[0])?, parse_f64(fields[1])?, parse_f64(fields[2])?];
        let v = if self.k > 0.0 {
            sphere_normalize(&v)
        } else if self.k < 0.0 {
            super::smooth::hyper_lift(v[1], v[2])
        } else {
            v
        };
        self.validate_point(&v)?;
        Ok(v)
    }
}

impl SampleFiber for ModelSurface {
    fn random_point(&self, rng: &mut dyn RngCore) -> V3 {
        let reach = if self.k > 0.0 { PI * self.scale() } else { 1.0 };
        self.polar(reach * rng.gen::<f64>(), rng.gen_range(0.0..TAU))
    }

    fn random_point_near(&self, c: &V3, radius: f64, rng: &mut dyn RngCore) -> V3 {
        let rho = radius * rng.gen::<f64>();
        let phi = rng.gen_range(0.0..TAU);
        let r = self.scale();
        if self.k < 0.0 {
            return hyper_exp(c, phi, rho / r);
        }
        if self.k == 0.0 {
            return [c[0] + rho * phi.cos(), c[1] + rho * phi.sin(), 0.0];
        }
        let target = sphere_polar(rho / r, phi);
        // Rotate the north-pole configuration onto `c`.
        rotate_north_to(c, &target)
    }
}

fn rotate_north_to(c: &V3, v: &V3) -> V3 {
    let n = [0.0, 0.0, 1.0];
    let axis = super::smooth::cross(&n, c);
    let s = super::smooth::norm(&axis);
    let cth = c[2];
    if s < 1e-15 {
        return if cth > 0.0 { *v } else { [v[0], -v[1], -v[2]] };
    }
    let k = [axis[0] / s, axis[1] / s, axis[2] / s];
    let kv = super::smooth::cross(&k, v);
    let kd = super::smooth::dot(&k, v);
    let out = [
        v[0] * cth + kv[0] * s + k[0] * kd * (1.0 - cth),
        v[1] * cth + kv[1] * s + k[1] * kd * (1.0 - cth),
        v[2] * cth + kv[2] * s + k[2] * kd * (1.0 - cth),
    ];
    sphere_normalize(&out)
}

/// Places a metric triangle with side lengths `d(x,y)`, `d(x,z)`, `d(y,z)` in
/// the model surface: `x` at the origin, `y` on the reference ray, `z` on the
/// positive side.
pub fn realize_metric_triangle(k: f64, dxy: f64, dxz: f64, dyz: f64) -> Result<[V3; 3]> {
    let m = ModelSurface::new(k)?;
    let sides = [dxy, dxz, dyz];
    if sides.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::Precondition(format!("side lengths must be finite and non-negative: {sides:?}")));
    }
    let slack = 1e-12 * (dxy + dxz + dyz).max(1.0);
    if dxy > dxz + dyz + slack || dxz > dxy + dyz + slack || dyz > dxy + dxz + slack {
        return Err(Error::TriangleInequality(dxy, dxz, dyz));
    }
    if k > 0.0 && dxy + dxz + dyz >= TAU / k.sqrt() {
        return Err(Error::Precondition(format!(
            "perimeter {} must be below {} for K = {k}",
            dxy + dxz + dyz,
            TAU / k.sqrt()
        )));
    }
    let theta = m.angle(dxy, dxz, dyz);
    Ok([m.origin(), m.polar(dxy, 0.0), m.polar(dxz, theta)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn realized_sides_match() {
        for &k in &[-2.0, -1.0, 0.0, 0.5, 1.0] {
            let m = ModelSurface::new(k).unwrap();
            for &(a, b, c) in &[(1.0, 1.2, 0.9), (0.3, 0.5, 0.8), (1e-4, 2e-4, 1.5e-4), (0.7, 0.7, 0.0)] {
                let [x, y, z] = realize_metric_triangle(k, a, b, c).unwrap();
                assert!((m.distance(&x, &y) - a).abs() < 1e-12, "K={k}");
                assert!((m.distance(&x, &z) - b).abs() < 1e-12, "K={k}");
                assert!((m.distance(&y, &z) - c).abs() < 1e-10, "K={k} {}", m.distance(&y, &z));
            }
        }
    }

    #[test]
    fn rejects_bad_triangles() {
        assert!(matches!(realize_metric_triangle(0.0, 1.0, 1.0, 3.0), Err(Error::TriangleInequality(..))));
        assert!(realize_metric_triangle(1.0, 2.0, 2.0, 2.5).is_err());
    }

    #[test]
    fn sphere_sampling_near_center() {
        let m = ModelSurface::new(4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let c = m.random_point(&mut rng);
            let p = m.random_point_near(&c, 0.1, &mut rng);
            assert!(m.distance(&c, &p) <= 0.1 + 1e-12);
        }
    }
}
