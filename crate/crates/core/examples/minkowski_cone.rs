//! Time separation on the Minkowski cone `(0, inf) x_t H2` against the closed
//! form `sqrt(s^2 + t^2 - 2 s t cosh d)`, plus the causal relation of a few pairs.

use lorcone::cone::{minkowski_tau, ConePoint, GeneralizedCone};
use lorcone::fiber::{FiberSpace, Hyperbolic2};
use lorcone::warp::{Interval, WarpKind, WarpSpec};

fn main() -> lorcone::Result<()> {
    let h2 = Hyperbolic2::new(1.0)?;
    let cone = GeneralizedCone::new(WarpSpec::new(WarpKind::Identity, Interval::positive())?, h2);
    let p = ConePoint::new(1.0, Hyperbolic2::origin());
    println!("{:>6} {:>6} {:>14} {:>14} {:>14}", "t", "rho", "relation", "tau", "closed form");
    for (t, rho) in [(2.0, 0.3), (2.0, 0.62236), (2.0, (2f64).ln()), (3.0, 1.5), (1.5, 1.0)] {
        let q = ConePoint::new(t, h2.point_polar(rho, 0.7));
        let d = h2.distance(&p.x, &q.x);
        let v = cone.relate(&p, &q)?;
        let tau = cone.time_separation(&p, &q)?;
        println!("{t:>6.3} {rho:>6.3} {:>14} {tau:>14.9} {:>14.9}", v.relation.name(), minkowski_tau(p.t, t, d));
    }
    Ok(())
}
