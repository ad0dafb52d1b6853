//! The built-in fibers: distances, geodesic midpoints and comparison
//! triangles in the Riemannian model surfaces.

use lorcone::fiber::{realize_metric_triangle, FiberSpace, Hyperbolic2, MetricGraph, ModelSurface, Sphere2};

fn main() -> lorcone::Result<()> {
    let s2 = Sphere2::new(1.0)?;
    let (n, e) = (Sphere2::point(0.0, 0.0), Sphere2::point(std::f64::consts::FRAC_PI_2, 0.0));
    let m = s2.geodesic_point(&n, &e, 0.5)?;
    println!("S2: d(n, e) = {:.9}, midpoint at {:.9} from n", s2.distance(&n, &e), s2.distance(&n, &m));

    let h2 = Hyperbolic2::new(1.0)?;
    let (x, y) = (h2.point_polar(1.0, 0.0), h2.point_polar(1.0, 2.0));
    let m = h2.geodesic_point(&x, &y, 0.5)?;
    println!("H2: d(x, y) = {:.9}, midpoint at {:.9} from x", h2.distance(&x, &y), h2.distance(&x, &m));

    let g = MetricGraph::parse_edge_list("a b 1\nb c 2\nb d 0.5\n")?;
    let (a, c) = (g.decode(&["v:a"])?, g.decode(&["v:c"])?);
    let mid = g.geodesic_point(&a, &c, 0.5)?;
    println!("graph: d(a, c) = {}, midpoint {:?}", g.distance(&a, &c), g.encode(&mid));

    for k in [-1.0, 0.0, 1.0] {
        let pts = realize_metric_triangle(k, 1.0, 1.0, 1.0)?;
        let surf = ModelSurface::new(k)?;
        let d = surf.distance(&pts[1], &pts[2]);
        println!("M2({k}): equilateral triangle of side 1, recomputed side {d:.12}");
    }
    Ok(())
}
