//! Brute-force references used by the acceptance suite and the tests.

use crate::llstructure::{CurveCatalog, TauValue};
use crate::warp::WarpSpec;
use rayon::prelude::*;

/// Grid for [`dp_tau`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpGrid {
    pub time_steps: usize,
    pub space_steps: usize,
    /// Largest number of time steps one segment may span.
    pub max_jump: usize,
}

impl Default for DpGrid {
    fn default() -> Self {
        DpGrid { time_steps: 600, space_steps: 600, max_jump: 16 }
    }
}

/// Longest piecewise-linear causal path from `(t0, 0)` to `(t1, d)` in
/// `I x_f R` with vertices on a grid. Segments may span up to `max_jump`
/// time steps so that slopes are resolved finely; each segment contributes
/// `sqrt(dt^2 - f(mid)^2 dx^2)`. Returns 0 when no grid path exists.
pub fn dp_tau(warp: &WarpSpec, t0: f64, t1: f64, d: f64, grid: DpGrid) -> f64 {
    let (n, m) = (grid.time_steps, grid.space_steps);
    let h = (t1 - t0) / n as f64;
    let dx = if m > 0 { d / m as f64 } else { 0.0 };
    let kmax = grid.max_jump.max(1);
    // f at segment midpoints, indexed by [start][jump - 1].
    let fmid: Vec<Vec<f64>> =
        (0..n).map(|i| (1..=kmax).map(|k| warp.f(t0 + (i as f64 + 0.5 * k as f64) * h)).collect()).collect();
    let mut v = vec![vec![f64::NEG_INFINITY; m + 1]; n + 1];
    v[0][0] = 0.0;
    for i in 1..=n {
        let row: Vec<f64> = (0..=m)
            .into_par_iter()
            .map(|j| {
                let mut best = f64::NEG_INFINITY;
                for k in 1..=kmax.min(i) {
                    let src = &v[i - k];
                    let f = fmid[i - k][k - 1];
                    let dt = k as f64 * h;
                    let max_steps = if dx > 0.0 { (dt / (f * dx)).floor() as usize } else { 0 };
                    for s in 0..=max_steps.min(j) {
                        let prev = src[j - s];
                        if prev == f64::NEG_INFINITY {
                            continue;
                        }
                        let r = dt * dt - (f * s as f64 * dx).powi(2);
                        if r >= 0.0 {
                            best = best.max(prev + r.sqrt());
                        }
                    }
                }
                best
            })
            .collect();
        v[i] = row;
    }
    v[n][m].max(0.0)
}

/// `tau` by exhaustive enumeration of simple paths, for acyclic catalogs.
/// Returns `None` when the catalog has a directed cycle.
pub fn enumerate_tau(cat: &CurveCatalog) -> Option<Vec<Vec<TauValue>>> {
    let n = cat.points().len();
    let mut adj = vec![vec![]; n];
    for c in cat.curves() {
        if c.from == c.to {
            return None;
        }
        adj[c.from].push((c.to, c.length));
    }
    fn walk(v: usize, len: f64, adj: &[Vec<(usize, f64)>], on: &mut [bool], best: &mut [f64]) -> bool {
        best[v] = best[v].max(len);
        for &(w, l) in &adj[v] {
            if on[w] {
                return false;
            }
            on[w] = true;
            let ok = walk(w, len + l, adj, on, best);
            on[w] = false;
            if !ok {
                return false;
            }
        }
        true
    }
    let mut out = vec![];
    for s in 0..n {
        let mut best = vec![f64::NEG_INFINITY; n];
        let mut on = vec![false; n];
        on[s] = true;
        if !walk(s, 0.0, &adj, &mut on, &mut best) {
            return None;
        }
        out.push(best.into_iter().map(|b| TauValue::Finite(b.max(0.0))).collect());
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warp::Interval;

    #[test]
    fn flat_dp_is_close() {
        let w = WarpSpec::constant(1.0, Interval::real_line()).unwrap();
        let g = DpGrid { time_steps: 120, space_steps: 60, max_jump: 4 };
        let v = dp_tau(&w, 0.0, 2.0, 1.0, g);
        assert!((v - 3f64.sqrt()).abs() < 1e-12, "{v}");
    }

    #[test]
    fn enumeration_matches_longest_path() {
        let c = CurveCatalog::parse("a x y 1 timelike\nb y z 1 timelike\nd x z 3 timelike\ne z w 0 causal").unwrap();
        let t = enumerate_tau(&c).unwrap();
        assert_eq!(t, c.derived_tau());
        let cyc = CurveCatalog::parse("a x y 1 timelike\nb y x 0 causal").unwrap();
        assert!(enumerate_tau(&cyc).is_none());
    }
}
