//! A maximizing geodesic of de Sitter space `R x_cosh R`: its conserved
//! momentum, length against `tau`, and the variational length sequence.

use lorcone::cone::{ConePoint, GeneralizedCone};
use lorcone::fiber::RealLine;
use lorcone::warp::{Interval, WarpKind, WarpSpec};

fn main() -> lorcone::Result<()> {
    let cone = GeneralizedCone::new(WarpSpec::new(WarpKind::Cosh, Interval::real_line())?, RealLine);
    let (p, q) = (ConePoint::new(-0.8, 0.0), ConePoint::new(0.9, 0.9));
    let m = cone.maximizer(&p, &q)?;
    println!("tau = {:.9}, kappa = {:?}", m.tau(), m.kappa());
    let path = m.sample(401)?;
    let mom = cone.momentum_profile(&path);
    let (lo, hi) = mom.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    println!("f^2 v over {} segments: [{lo:.9}, {hi:.9}]", mom.len());
    println!("path length = {:.9} ({})", cone.path_length(&path)?, cone.classify_path(&path)?.name());
    let coarse = m.sample(9)?;
    println!("9-sample path length = {:.9}; variational length by depth:", cone.path_length(&coarse)?);
    let var = cone.variational_length(&coarse, 8)?;
    for (k, v) in var.iter().enumerate() {
        println!("  depth {k}: {v:.9}");
    }
    for s in [0.25, 0.5, 0.75] {
        let r = m.point_at_length(s * m.tau())?;
        println!("proper time {:.4}: t = {:.6}, x = {:.6}", s * m.tau(), r.t, r.x);
    }
    Ok(())
}
