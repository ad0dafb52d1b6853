//! Comparison triangles in the Lorentzian model planes and the strict
//! ordering of corresponding separations between two curvatures.

use lorcone::comparison::{model_sandwich, size_bounds_check};
use lorcone::lorentz_model::{modified_distance, LorentzModel};

fn main() -> lorcone::Result<()> {
    let (a, b, c) = (0.3, 0.4, 0.9);
    for k in [-1.0, 0.0, 1.0] {
        if !size_bounds_check(k, a, b, c) {
            println!("K = {k}: size bounds fail");
            continue;
        }
        let m = LorentzModel::new(k)?;
        let t = m.realize_triangle(a, b, c)?;
        println!(
            "K = {k:>4}: y' = ({:.6}, {:.6}), residual {:.1e}, tau(x', z') = {:.9}",
            t.y.t,
            t.y.x,
            t.residual,
            m.tau(&t.x, &t.z)?
        );
    }
    println!("two-model comparison K = 0 against K' = 1 on side yz:");
    for (s, t0, t1) in model_sandwich(0.0, 1.0, a, b, c, 4)? {
        println!("  s = {s:.3}: {t0:.9} < {t1:.9}");
    }
    println!("modified distance at E = -0.25: K = -1 {:.9}, K = 0 {:.9}, K = 1 {:.9}",
        modified_distance(-1.0, -0.25), modified_distance(0.0, -0.25), modified_distance(1.0, -0.25));
    Ok(())
}
