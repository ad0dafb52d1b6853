//! Null transport `h_{p0}` and the horizons of a few warping functions: the
//! null cone from base time `p0` reaches fiber distance `F(r) = \int_{p0}^r 1/f`.

use lorcone::warp::{Interval, WarpKind, WarpSpec};
use std::f64::consts::PI;

fn main() -> lorcone::Result<()> {
    let warps = [
        ("exp on R", WarpSpec::new(WarpKind::Exp, Interval::real_line())?, 0.0),
        ("t on (0, inf)", WarpSpec::new(WarpKind::Identity, Interval::positive())?, 1.0),
        ("sin on (0, pi)", WarpSpec::new(WarpKind::Sin, Interval::new(0.0, PI)?)?, PI / 2.0),
        ("cosh on R", WarpSpec::new(WarpKind::Cosh, Interval::real_line())?, 0.0),
    ];
    for (name, w, p0) in warps {
        let nt = w.null_transport(p0)?;
        println!("{name}: p0 = {p0:.4}, backward horizon {:.6}, forward horizon {:.6}", nt.backward_horizon(), nt.forward_horizon());
        for s in [0.25, 0.5, 0.9] {
            if s < nt.forward_horizon() {
                let r = nt.solve(s)?;
                println!("  h({s}) = {r:.9}, F(h({s})) = {:.9}", nt.reach(r)?);
            }
        }
    }
    Ok(())
}
