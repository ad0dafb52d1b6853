//! Finite Lorentzian length structures: a catalog of curves between points,
//! closed under concatenation, with derived relations and time separation.

use crate::error::{Error, Result};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use rand::Rng;
use std::collections::HashMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveClass {
    Timelike,
    Causal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    pub from: usize,
    pub to: usize,
    pub length: f64,
    pub class: CurveClass,
}

/// Points with ids and the generating curves.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurveCatalog {
    points: Vec<String>,
    index: HashMap<String, usize>,
    curves: Vec<Curve>,
}

/// Time separation value in `[0, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauValue {
    Finite(f64),
    Infinite,
}

impl TauValue {
    pub fn is_positive(&self) -> bool {
        match self {
            TauValue::Finite(v) => *v > 0.0,
            TauValue::Infinite => true,
        }
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            TauValue::Finite(v) => Some(*v),
            TauValue::Infinite => None,
        }
    }
}

impl fmt::Display for TauValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauValue::Finite(v) => write!(f, "{}", crate::report::fmt_num(*v)),
            TauValue::Infinite => write!(f, "inf"),
        }
    }
}

/// `causal[x][y]` is `x <= y`, `chrono[x][y]` is `x << y`.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationTable {
    pub causal: Vec<Vec<bool>>,
    pub chrono: Vec<Vec<bool>>,
}

impl CurveCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a point, returning its index (existing ids are reused).
    pub fn add_point(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        self.points.push(id.to_string());
        self.index.insert(id.to_string(), self.points.len() - 1);
        self.points.len() - 1
    }

    /// Adds a curve; timelike curves need positive length.
    pub fn add_curve(&mut self, name: &str, from: &str, to: &str, length: f64, class: CurveClass) -> Result<()> {
        if !(length.is_finite() && length >= 0.0) {
            return Err(Error::Catalog(format!("curve {name}: length must be finite and non-negative, got {length}")));
        }
        if class == CurveClass::Timelike && length <= 0.0 {
            return Err(Error::Catalog(format!("curve {name}: timelike curves need positive length")));
        }
        let (f, t) = (self.add_point(from), self.add_point(to));
        self.curves.push(Curve { name: name.to_string(), from: f, to: t, length, class });
        Ok(())
    }

    /// Lines `name from to length class` or `point id`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cat = CurveCatalog::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            let err = |m: String| Error::Catalog(format!("line {}: {m}", no + 1));
            match f.as_slice() {
                ["point", id] => {
                    cat.add_point(id);
                }
                [name, from, to, len, class] => {
                    let length: f64 = len.parse().map_err(|_| err(format!("bad length {len:?}")))?;
                    let class = match *class {
                        "timelike" => CurveClass::Timelike,
                        "causal" => CurveClass::Causal,
                        _ => return Err(err(format!("class must be timelike or causal, got {class:?}"))),
                    };
                    cat.add_curve(name, from, to, length, class).map_err(|e| err(e.to_string()))?;
                }
                _ => return Err(err("expected `name from to length class` or `point id`".into())),
            }
        }
        Ok(cat)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for p in &self.points {
            s.push_str(&format!("point {p}\n"));
        }
        for c in &self.curves {
            let class = if c.class == CurveClass::Timelike { "timelike" } else { "causal" };
            s.push_str(&format!("{} {} {} {:?} {class}\n", c.name, self.points[c.from], self.points[c.to], c.length));
        }
        s
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn point_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    fn closure(&self, timelike_only: bool, reflexive: bool) -> Vec<Vec<bool>> {
        let n = self.points.len();
        let mut adj = vec![vec![]; n];
        for c in &self.curves {
            if !timelike_only || c.class == CurveClass::Timelike {
                adj[c.from].push(c.to);
            }
        }
        (0..n)
            .map(|s| {
                let mut seen = vec![false; n];
                let mut stack: Vec<usize> = adj[s].clone();
                while let Some(v) = stack.pop() {
                    if !seen[v] {
                        seen[v] = true;
                        stack.extend(adj[v].iter().copied());
                    }
                }
                if reflexive {
                    seen[s] = true;
                }
                seen
            })
            .collect()
    }

    /// `<=` is the reflexive transitive closure over all curves, `<<` the
    /// transitive closure over timelike curves.
    pub fn derived_relations(&self) -> RelationTable {
        RelationTable { causal: self.closure(false, true), chrono: self.closure(true, false) }
    }

    /// `tau(x, y)`: supremum of concatenated lengths, by longest paths on the
    /// condensation; pairs reaching a component with an internal curve of
    /// positive length are infinite.
    pub fn derived_tau(&self) -> Vec<Vec<TauValue>> {
        let n = self.points.len();
        let mut g = DiGraph::<(), f64>::with_capacity(n, self.curves.len());
        let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
        for c in &self.curves {
            g.add_edge(nodes[c.from], nodes[c.to], c.length);
        }
        // Tarjan yields components in reverse topological order.
        let mut sccs = tarjan_scc(&g);
        sccs.reverse();
        let m = sccs.len();
        let mut comp = vec![0; n];
        for (i, s) in sccs.iter().enumerate() {
            for v in s {
                comp[v.index()] = i;
            }
        }
        let mut unbounded = vec![false; m];
        let mut out: Vec<Vec<(usize, f64)>> = vec![vec![]; m];
        for c in &self.curves {
            let (a, b) = (comp[c.from], comp[c.to]);
            if a == b {
                unbounded[a] |= c.length > 0.0;
            } else {
                out[a].push((b, c.length));
            }
        }
        let mut tau = vec![vec![TauValue::Finite(0.0); n]; n];
        for s in 0..m {
            let mut best = vec![f64::NEG_INFINITY; m];
            let mut inf = vec![false; m];
            best[s] = 0.0;
            inf[s] = unbounded[s];
            for c in s..m {
                if best[c] == f64::NEG_INFINITY {
                    continue;
                }
                for &(d, w) in &out[c] {
                    best[d] = best[d].max(best[c] + w);
                    inf[d] |= inf[c] || unbounded[d];
                }
            }
            for &x in &sccs[s] {
                for y in 0..n {
                    let c = comp[y];
                    if best[c] > f64::NEG_INFINITY {
                        tau[x.index()][y] = if inf[c] { TauValue::Infinite } else { TauValue::Finite(best[c]) };
                    }
                }
            }
        }
        tau
    }

    /// Independent evaluation by repeated relaxation; pairs still improving
    /// after `n` rounds are infinite.
    pub fn tau_by_relaxation(&self) -> Vec<Vec<TauValue>> {
        let n = self.points.len();
        (0..n)
            .map(|s| {
                let mut best = vec![f64::NEG_INFINITY; n];
                best[s] = 0.0;
                for _ in 0..n {
                    for c in &self.curves {
                        if best[c.from] > f64::NEG_INFINITY {
                            best[c.to] = best[c.to].max(best[c.from] + c.length);
                        }
                    }
                }
                let mut grow = vec![false; n];
                for _ in 0..=n {
                    for c in &self.curves {
                        if best[c.from] > f64::NEG_INFINITY && (best[c.from] + c.length > best[c.to] || grow[c.from]) {
                            grow[c.to] = true;
                        }
                    }
                }
                (0..n)
                    .map(|y| {
                        if grow[y] {
                            TauValue::Infinite
                        } else if best[y] > f64::NEG_INFINITY {
                            TauValue::Finite(best[y])
                        } else {
                            TauValue::Finite(0.0)
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Outcome of [`check_bare_llspace`].
#[derive(Debug, Clone, PartialEq)]
pub struct BareVerdict {
    pub points: usize,
    pub curves: usize,
    pub triples_checked: usize,
    pub failures: Vec<String>,
}

impl BareVerdict {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the reverse triangle inequality on causal chains, positivity on
/// `<<`, vanishing off `<=`, and agreement of two independent evaluations of
/// the derived `tau`.
pub fn check_bare_llspace(cat: &CurveCatalog) -> BareVerdict {
    let n = cat.points.len();
    let rel = cat.derived_relations();
    let tau = cat.derived_tau();
    let alt = cat.tau_by_relaxation();
    let name = |i: usize| &cat.points[i];
    let mut failures = vec![];
    let mut triples = 0;
    let tol = |v: f64| 1e-12 * v.abs().max(1.0);
    for x in 0..n {
        for y in 0..n {
            let t = tau[x][y];
            if rel.chrono[x][y] && !t.is_positive() {
                failures.push(format!("{} << {} but tau = {t}", name(x), name(y)));
            }
            if !rel.causal[x][y] && t != TauValue::Finite(0.0) {
                failures.push(format!("{} is not <= {} but tau = {t}", name(x), name(y)));
            }
            let same = match (t, alt[x][y]) {
                (TauValue::Finite(a), TauValue::Finite(b)) => (a - b).abs() <= tol(a),
                (a, b) => a == b,
            };
            if !same {
                failures.push(format!("tau({}, {}) = {t} but the supremum over curves is {}", name(x), name(y), alt[x][y]));
            }
            if !rel.causal[x][y] {
                continue;
            }
            for z in 0..n {
                if !rel.causal[y][z] {
                    continue;
                }
                triples += 1;
                let ok = match (tau[x][y], tau[y][z], tau[x][z]) {
                    (_, _, TauValue::Infinite) => true,
                    (TauValue::Finite(a), TauValue::Finite(b), TauValue::Finite(c)) => a + b <= c + tol(c),
                    _ => false,
                };
                if !ok {
                    failures.push(format!(
                        "reverse triangle inequality fails on {} <= {} <= {}: {} + {} > {}",
                        name(x),
                        name(y),
                        name(z),
                        tau[x][y],
                        tau[y][z],
                        tau[x][z]
                    ));
                }
            }
        }
    }
    BareVerdict { points: n, curves: cat.curves.len(), triples_checked: triples, failures }
}

/// Random catalog on `n` points. Curves go forward in the point order unless
/// `backward` is positive, the probability of a reversed curve; reversed
/// curves get length zero with probability `1/2`.
pub fn random_catalog<R: Rng + ?Sized>(rng: &mut R, n: usize, n_curves: usize, backward: f64) -> CurveCatalog {
    let mut cat = CurveCatalog::new();
    for i in 0..n {
        cat.add_point(&format!("p{i}"));
    }
    if n < 2 {
        return cat;
    }
    for k in 0..n_curves {
        let mut a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        let reversed = rng.gen::<f64>() < backward;
        let timelike = rng.gen::<f64>() < 0.6;
        let mut length = if timelike { rng.gen_range(0.05..2.0) } else if rng.gen::<bool>() { 0.0 } else { rng.gen_range(0.0..2.0) };
        let class = if timelike { CurveClass::Timelike } else { CurveClass::Causal };
        if reversed {
            std::mem::swap(&mut a, &mut b);
            if rng.gen::<bool>() && class == CurveClass::Causal {
                length = 0.0;
            }
        }
        cat.add_curve(&format!("c{k}"), &format!("p{a}"), &format!("p{b}"), length, class).expect("valid random curve");
    }
    cat
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_examples() {
        let c = CurveCatalog::parse("c1 x y 0.5 causal").unwrap();
        let r = c.derived_relations();
        let (x, y) = (c.point_index("x").unwrap(), c.point_index("y").unwrap());
        assert!(r.causal[x][y] && !r.chrono[x][y]);
        let c = CurveCatalog::parse("a x y 1 timelike\nb y z 1 timelike").unwrap();
        let r = c.derived_relations();
        assert!(r.chrono[0][2]);
        let e = CurveCatalog::parse("point x\npoint y").unwrap();
        let r = e.derived_relations();
        assert!(r.causal[0][0] && !r.causal[0][1]);
    }

    #[test]
    fn tau_examples() {
        let c = CurveCatalog::parse("a x y 1 timelike\nb y z 1 timelike\nd x z 3 timelike").unwrap();
        assert_eq!(c.derived_tau()[0][2], TauValue::Finite(3.0));
        let cyc = CurveCatalog::parse("a x y 1 timelike\nb y x 0 causal\nc y z 1 causal").unwrap();
        let t = cyc.derived_tau();
        assert_eq!(t[0][2], TauValue::Infinite);
        assert_eq!(t[2][0], TauValue::Finite(0.0));
        let zero = CurveCatalog::parse("a x y 0 causal\nb y x 0 causal").unwrap();
        assert_eq!(zero.derived_tau()[0][1], TauValue::Finite(0.0));
        assert!(check_bare_llspace(&cyc).passed());
    }

    #[test]
    fn rejects_null_timelike() {
        assert!(CurveCatalog::parse("a x y 0 timelike").is_err());
        assert!(CurveCatalog::parse("a x y -1 causal").is_err());
        assert!(CurveCatalog::parse("a x y").is_err());
    }

    #[test]
    fn text_round_trip() {
        let c = CurveCatalog::parse("point w\na x y 0.1 timelike\nb y z 0 causal").unwrap();
        assert_eq!(CurveCatalog::parse(&c.to_text()).unwrap(), c);
    }
}
