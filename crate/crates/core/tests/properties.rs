use lorcone::comparison::{certify_bound, Direction, Sampling};
use lorcone::cone::{CausalPath, ConePoint, GeneralizedCone, PathClass, Relation};
use lorcone::fiber::{EuclideanN, Hyperbolic2, MetricGraph, RealLine, SampleFiber, Sphere2};
use lorcone::llstructure::{random_catalog, CurveClass, TauValue};
use lorcone::lorentz_model::LorentzModel;
use lorcone::warp::{Interval, WarpKind, WarpSpec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn sin_cone() -> GeneralizedCone<RealLine> {
    GeneralizedCone::new(WarpSpec::new(WarpKind::Sin, Interval::new(0.0, PI).unwrap()).unwrap(), RealLine)
}

fn cosh_cone() -> GeneralizedCone<RealLine> {
    GeneralizedCone::new(WarpSpec::new(WarpKind::Cosh, Interval::real_line()).unwrap(), RealLine)
}

fn cone(which: usize) -> GeneralizedCone<RealLine> {
    match which {
        0 => sin_cone(),
        1 => cosh_cone(),
        _ => GeneralizedCone::new(WarpSpec::new(WarpKind::Identity, Interval::positive()).unwrap(), RealLine),
    }
}

/// Base-time range used for sampling each cone of [`cone`].
fn window(which: usize) -> (f64, f64) {
    match which {
        0 => (0.2, 2.9),
        1 => (-1.2, 1.2),
        _ => (0.2, 3.0),
    }
}

/// A point `u` of the way through the window.
fn at(which: usize, u: f64) -> f64 {
    let (a, b) = window(which);
    a + (b - a) * u
}

/// `(t1, d)` with `d` the fraction `v` of the null reach from `t0`.
fn causal_target(c: &GeneralizedCone<RealLine>, t0: f64, t1: f64, v: f64) -> f64 {
    v * c.warp().null_reach(t0, t1, Default::default()).unwrap()
}

fn tau_le(a: TauValue, b: TauValue) -> bool {
    match (a, b) {
        (_, TauValue::Infinite) => true,
        (TauValue::Infinite, TauValue::Finite(_)) => false,
        (TauValue::Finite(x), TauValue::Finite(y)) => x <= y + 1e-12 * y.abs().max(1.0),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn reverse_triangle_inequality(
        which in 0usize..3,
        u in prop::array::uniform3(0.0f64..1.0),
        v in prop::array::uniform2(0.0f64..1.0),
        dir in prop::array::uniform2(prop::bool::ANY),
    ) {
        let c = cone(which);
        let mut ts = u.map(|x| at(which, x));
        ts.sort_by(f64::total_cmp);
        prop_assume!(ts[1] - ts[0] > 1e-3 && ts[2] - ts[1] > 1e-3);
        let sign = |b: bool| if b { 1.0 } else { -1.0 };
        let x0 = 0.0;
        let x1 = x0 + sign(dir[0]) * causal_target(&c, ts[0], ts[1], v[0]);
        let x2 = x1 + sign(dir[1]) * causal_target(&c, ts[1], ts[2], v[1]);
        let (p, q, r) = (ConePoint::new(ts[0], x0), ConePoint::new(ts[1], x1), ConePoint::new(ts[2], x2));
        let pq = c.time_separation(&p, &q).unwrap();
        let qr = c.time_separation(&q, &r).unwrap();
        let pr = c.time_separation(&p, &r).unwrap();
        prop_assert!(pq + qr <= pr + 1e-8, "{pq} + {qr} > {pr}");
    }

    #[test]
    fn push_up_from_positive_length(
        which in 0usize..3,
        u in prop::array::uniform2(0.0f64..1.0),
        slopes in prop::collection::vec(-1.0f64..1.0, 8),
    ) {
        let c = cone(which);
        let (t0, t1) = (at(which, u[0].min(u[1])), at(which, u[0].max(u[1])));
        prop_assume!(t1 - t0 > 1e-2);
        let n = slopes.len();
        let mut pts = vec![ConePoint::new(t0, 0.0)];
        let mut x = 0.0;
        for (i, s) in slopes.iter().enumerate() {
            let (a, b) = (t0 + (t1 - t0) * i as f64 / n as f64, t0 + (t1 - t0) * (i + 1) as f64 / n as f64);
            x += s * c.warp().null_reach(a, b, Default::default()).unwrap();
            pts.push(ConePoint::new(b, x));
        }
        let path = CausalPath::new(pts).unwrap();
        prop_assume!(c.certify(&path).is_ok());
        let len = c.path_length(&path).unwrap();
        if len > 1e-6 {
            let rel = c.relate(path.first(), path.last()).unwrap().relation;
            prop_assert_eq!(rel, Relation::Chronological);
            // A maximizer is at least as long as any causal path.
            let tau = c.time_separation(path.first(), path.last()).unwrap();
            prop_assert!(len <= tau + 1e-3 * tau.max(1e-3), "L = {len} > tau = {tau}");
        }
    }

    #[test]
    fn tau_is_monotone_in_fiber_distance(which in 0usize..3, u in prop::array::uniform2(0.0f64..1.0), v in prop::array::uniform2(0.0f64..1.0)) {
        let c = cone(which);
        let (t0, t1) = (at(which, u[0].min(u[1])), at(which, u[0].max(u[1])));
        prop_assume!(t1 - t0 > 1e-3);
        let reach = causal_target(&c, t0, t1, 1.0);
        let (d_small, d_big) = (reach * v[0].min(v[1]), reach * v[0].max(v[1]));
        let a = c.tau_profile(t0, t1, d_small).unwrap().tau;
        let b = c.tau_profile(t0, t1, d_big).unwrap().tau;
        prop_assert!(a >= b - 1e-12, "tau({d_small}) = {a} < tau({d_big}) = {b}");
    }

    #[test]
    fn maximizers_are_timelike_or_null(which in 0usize..3, u in prop::array::uniform2(0.0f64..1.0), v in 0.0f64..1.0, null in prop::bool::ANY) {
        let c = cone(which);
        let (t0, t1) = (at(which, u[0].min(u[1])), at(which, u[0].max(u[1])));
        prop_assume!(t1 - t0 > 1e-2);
        let d = causal_target(&c, t0, t1, if null { 1.0 } else { 0.95 * v });
        let (p, q) = (ConePoint::new(t0, 0.0), ConePoint::new(t1, d));
        let path = c.maximizing_geodesic(&p, &q, 41).unwrap();
        let class = c.classify_path(&path).unwrap();
        if null {
            prop_assert_eq!(class, PathClass::Null);
        } else {
            prop_assert_eq!(class, PathClass::Timelike);
        }
    }

    #[test]
    fn partition_sums_of_tau_match_length(which in 0usize..3, u in prop::array::uniform2(0.0f64..1.0), v in 0.0f64..0.95) {
        let c = cone(which);
        let (t0, t1) = (at(which, u[0].min(u[1])), at(which, u[0].max(u[1])));
        prop_assume!(t1 - t0 > 1e-2);
        let d = causal_target(&c, t0, t1, v);
        let (p, q) = (ConePoint::new(t0, 0.0), ConePoint::new(t1, d));
        let tau = c.time_separation(&p, &q).unwrap();
        let path = c.maximizing_geodesic(&p, &q, 65).unwrap();
        let len = c.path_length(&path).unwrap();
        let coarse = c.maximizing_geodesic(&p, &q, 9).unwrap();
        let sum: f64 = coarse.samples().windows(2).map(|w| c.time_separation(&w[0], &w[1]).unwrap()).sum();
        prop_assert!((sum - tau).abs() <= 1e-6, "partition sum {sum} vs tau {tau}");
        prop_assert!((len - tau).abs() <= 1e-3, "length {len} vs tau {tau}");
    }

    #[test]
    fn energy_is_minimal_for_proper_time(
        which in 0usize..3,
        u in prop::array::uniform2(0.0f64..1.0),
        v in 0.0f64..0.95,
        weights in prop::collection::vec(0.05f64..1.0, 20),
    ) {
        let c = cone(which);
        let (t0, t1) = (at(which, u[0].min(u[1])), at(which, u[0].max(u[1])));
        prop_assume!(t1 - t0 > 1e-2);
        let d = causal_target(&c, t0, t1, v);
        let path = c.maximizing_geodesic(&ConePoint::new(t0, 0.0), &ConePoint::new(t1, d), 21).unwrap();
        let len = c.path_length(&path).unwrap();
        let seg: Vec<f64> = path
            .samples()
            .windows(2)
            .map(|w| {
                let f = c.warp().f(0.5 * (w[0].t + w[1].t));
                ((w[1].t - w[0].t).powi(2) - f * f * (w[1].x - w[0].x).powi(2)).sqrt()
            })
            .collect();
        let cumulative = |steps: &[f64]| -> Vec<f64> {
            std::iter::once(0.0).chain(steps.iter().scan(0.0, |acc, s| { *acc += s; Some(*acc) })).collect()
        };
        let proper = path.reparametrized(cumulative(&seg)).unwrap();
        let e0 = c.energy(&proper).unwrap();
        prop_assert!((e0 - len / 2.0).abs() <= 1e-9 * len.max(1.0), "E = {e0}, L/2 = {}", len / 2.0);
        let total: f64 = weights.iter().sum();
        let steps: Vec<f64> = weights.iter().map(|w| w / total * len).collect();
        let other = path.reparametrized(cumulative(&steps)).unwrap();
        let e = c.energy(&other).unwrap();
        prop_assert!(e >= len / 2.0 - 1e-9 * len.max(1.0), "E = {e} < L/2 = {}", len / 2.0);
    }

    #[test]
    fn perturbed_maximizers_are_not_longer(which in 0usize..3, u in prop::array::uniform2(0.0f64..1.0), v in 0.0f64..0.9, noise in prop::collection::vec(-1.0f64..1.0, 15)) {
        let c = cone(which);
        let (t0, t1) = (at(which, u[0].min(u[1])), at(which, u[0].max(u[1])));
        prop_assume!(t1 - t0 > 1e-2);
        let d = causal_target(&c, t0, t1, v);
        let path = c.maximizing_geodesic(&ConePoint::new(t0, 0.0), &ConePoint::new(t1, d), 17).unwrap();
        let base = c.path_length(&path).unwrap();
        let tau = c.time_separation(path.first(), path.last()).unwrap();
        for k in 2..10 {
            let eps = (t1 - t0) * 0.5f64.powi(k);
            let mut pts = path.samples().to_vec();
            for (p, n) in pts[1..16].iter_mut().zip(&noise) {
                p.x += eps * n * 0.05;
            }
            let bumped = CausalPath::new(pts).unwrap();
            if c.certify(&bumped).is_ok() {
                // The displacement is 0.05 eps; the sampled maximizer is only
                // stationary up to its discretization error.
                let l = c.path_length(&bumped).unwrap();
                prop_assert!(l <= base + eps, "perturbation {eps} lengthened {base} to {l}");
                prop_assert!(l <= tau + 1e-3 * tau, "perturbed length {l} exceeds tau = {tau}");
            }
        }
    }

    #[test]
    fn maximizers_stay_in_the_diamond_box(which in 0usize..3, u in prop::array::uniform2(0.0f64..1.0), v in 0.0f64..1.0) {
        let c = cone(which);
        let (t0, t1) = (at(which, u[0].min(u[1])), at(which, u[0].max(u[1])));
        prop_assume!(t1 - t0 > 1e-2);
        let d = causal_target(&c, t0, t1, v);
        let (p, q) = (ConePoint::new(t0, 0.0), ConePoint::new(t1, d));
        for r in c.maximizing_geodesic(&p, &q, 25).unwrap().samples() {
            prop_assert!(c.in_diamond_box(&p, &q, r), "{r:?} escapes the box of {p:?}, {q:?}");
        }
    }

    #[test]
    fn null_transport_inverts_its_reach(which in 0usize..3, u in prop::array::uniform2(0.0f64..1.0)) {
        let c = cone(which);
        let (p0, r) = (at(which, u[0]), at(which, u[1]));
        let nt = c.warp().null_transport(p0).unwrap();
        let s = nt.reach(r).unwrap();
        let back = nt.solve(s).unwrap();
        prop_assert!((back - r).abs() <= 1e-8 * r.abs().max(1.0), "h(F({r})) = {back}");
        let r2 = r + 1e-3;
        if c.warp().interval().contains(r2) {
            prop_assert!(nt.reach(r2).unwrap() > s);
        }
    }

    #[test]
    fn catalog_tau_grows_with_curves(seed in any::<u64>(), n in 2usize..9, extra in 0.0f64..2.0, timelike in prop::bool::ANY) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cat = random_catalog(&mut rng, n, 2 * n, 0.1);
        let before = cat.derived_tau();
        let mut bigger = cat.clone();
        let (from, to) = (seed as usize % n, (seed / 7) as usize % n);
        let (from, to) = (cat.points()[from].clone(), cat.points()[to].clone());
        let class = if timelike { CurveClass::Timelike } else { CurveClass::Causal };
        let len = if timelike { extra + 0.01 } else { 0.0 };
        if bigger.add_curve("extra", &from, &to, len, class).is_ok() {
            let after = bigger.derived_tau();
            for (rb, ra) in before.iter().zip(&after) {
                for (b, a) in rb.iter().zip(ra) {
                    prop_assert!(tau_le(*b, *a), "{b} > {a}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn model_triangles_reproduce_their_sides(k in prop::sample::select(vec![-1.0, 0.0, 1.0]), a in 0.05f64..0.4, b in 0.05f64..0.4, stretch in 1.02f64..1.5) {
        let c = (a + b) * stretch;
        let m = LorentzModel::new(k).unwrap();
        let t = m.realize_triangle(a, b, c).unwrap();
        prop_assert!((m.tau(&t.x, &t.y).unwrap() - a).abs() <= 1e-8);
        prop_assert!((m.tau(&t.y, &t.z).unwrap() - b).abs() <= 1e-8);
        prop_assert!((m.tau(&t.x, &t.z).unwrap() - c).abs() <= 1e-8);
    }
}

fn metric_axioms<X: SampleFiber>(fiber: &X, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..1000 {
        let (x, y, z) = (fiber.random_point(&mut rng), fiber.random_point(&mut rng), fiber.random_point(&mut rng));
        let (dxy, dyx, dyz, dxz) = (fiber.distance(&x, &y), fiber.distance(&y, &x), fiber.distance(&y, &z), fiber.distance(&x, &z));
        assert!(fiber.distance(&x, &x) <= 1e-9, "{}", fiber.name());
        assert!((dxy - dyx).abs() <= 1e-9, "{}", fiber.name());
        assert!(dxz <= dxy + dyz + 1e-9, "{}: {dxz} > {dxy} + {dyz}", fiber.name());
        let (u, v) = (0.3, 0.8);
        let (m, n) = (fiber.geodesic_point(&x, &y, u), fiber.geodesic_point(&x, &y, v));
        if let (Ok(m), Ok(n)) = (m, n) {
            let gap = (fiber.distance(&m, &n) - (v - u) * dxy).abs();
            assert!(gap <= 1e-9 * dxy.max(1.0), "{}: geodesic additivity off by {gap}", fiber.name());
        }
    }
}

#[test]
fn built_in_fibers_are_metric_and_geodesic() {
    metric_axioms(&RealLine, 1);
    metric_axioms(&EuclideanN::new(3).unwrap(), 2);
    metric_axioms(&Sphere2::new(1.0).unwrap(), 3);
    metric_axioms(&Hyperbolic2::new(1.0).unwrap(), 4);
    metric_axioms(&MetricGraph::tripod(1.0).unwrap(), 5);
}

#[test]
fn curvature_reports_are_deterministic() {
    let c = GeneralizedCone::new(WarpSpec::new(WarpKind::Cosh, Interval::real_line()).unwrap(), Sphere2::new(1.0).unwrap());
    let s = Sampling { n_triangles: 30, seed: 5, ..Sampling::default() };
    let a = certify_bound(&c, 1.0, Direction::Below, &s).unwrap();
    let b = certify_bound(&c, 1.0, Direction::Below, &s).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_csv(), b.to_csv());
    let other = certify_bound(&c, 1.0, Direction::Below, &Sampling { seed: 6, ..s }).unwrap();
    assert_ne!(a.to_csv(), other.to_csv());
}
