//! Concavity of warping functions and what it forces: finite diameters,
//! impossible lower bounds, and big bangs that rule out upper bounds.

use lorcone::warp::{Interval, WarpKind, WarpSpec};
use std::f64::consts::PI;

fn main() -> lorcone::Result<()> {
    let cases = [
        ("sin on (0, pi)", WarpSpec::new(WarpKind::Sin, Interval::new(0.0, PI)?)?, -1.0),
        ("exp on R", WarpSpec::new(WarpKind::Exp, Interval::real_line())?, 0.0),
        ("t^(2/3) on (0, inf)", WarpSpec::new(WarpKind::Power(2.0 / 3.0), Interval::positive())?, 0.0),
        ("cosh on R", WarpSpec::new(WarpKind::Cosh, Interval::real_line())?, 1.0),
    ];
    for (name, w, k) in cases {
        let r = w.singularity_report(k)?;
        println!(
            "{name}, K = {k}: lower bound consistent {}, diameter bound {}, big bang {}, upper bound possible {}",
            r.lower_bound_consistent, r.tau_diameter_bound, r.big_bang, r.upper_bound_possible
        );
        for v in &r.verdicts {
            println!("  {v}");
        }
    }
    Ok(())
}
