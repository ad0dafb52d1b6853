//! Sampled timelike curvature certification: the cone over the round sphere
//! with `f = cosh` against `K' = 1`, and the cone over a tripod, whose branch
//! point breaks a lower bound.

use lorcone::comparison::{certify_bound, fiber_bound_from_cone, Direction, Sampling};
use lorcone::cone::GeneralizedCone;
use lorcone::fiber::{MetricGraph, Sphere2};
use lorcone::warp::{Interval, WarpKind, WarpSpec};

fn main() -> lorcone::Result<()> {
    let sphere = GeneralizedCone::new(WarpSpec::new(WarpKind::Cosh, Interval::real_line())?, Sphere2::new(1.0)?);
    let s = Sampling { n_triangles: 100, seed: 1, ..Sampling::default() };
    let rep = certify_bound(&sphere, 1.0, Direction::Below, &s)?;
    println!("R x_cosh S2, K' = 1 below:\n{}", rep.summary());

    let tripod = GeneralizedCone::new(WarpSpec::new(WarpKind::Identity, Interval::positive())?, MetricGraph::tripod(0.02)?);
    let s = Sampling { n_triangles: 100, seed: 72, t_window: Some((0.5, 2.0)), fiber_scale: 1.0, ..Sampling::default() };
    for dir in [Direction::Below, Direction::Above] {
        let rep = certify_bound(&tripod, 0.0, dir, &s)?;
        println!("(0, inf) x_t tripod, K' = 0 {}:\n{}", dir.name(), rep.summary());
    }

    let both = fiber_bound_from_cone(&tripod, 0.0, 0.0, Direction::Above, &s)?;
    println!("fiber side of the tripod against the Euclidean plane: {}", both.fiber.verdict());
    Ok(())
}
