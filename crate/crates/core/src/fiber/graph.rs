use super::{check_fraction, parse_f64, FiberSpace, SampleFiber, TieBreak, TIE_TOLERANCE};
use crate::error::{Error, Result};
use rand::{Rng, RngCore};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

/// A point on a metric graph: an edge id and the offset from that edge's
/// first endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphPoint {
    pub edge: usize,
    pub offset: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Edge {
    u: usize,
    v: usize,
    w: f64,
}

/// Finite connected metric graph with positive edge lengths.
///
/// A vertex is stored as the endpoint of its smallest incident edge id
/// (offset `0` or the edge length, depending on which end it is).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    labels: Vec<String>,
    edges: Vec<Edge>,
    incident: Vec<Vec<usize>>,
    dist: Vec<Vec<f64>>,
    tie_break: TieBreak,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Loc {
    Vertex(usize),
    Interior(usize, f64),
}

/// One stretch of a route along an original edge.
#[derive(Debug, Clone, Copy)]
struct Leg {
    edge: usize,
    from: f64,
    to: f64,
}

#[derive(Clone, Copy, PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

/// Adjacency entry: (neighbour, length, arc id).
type Adj = Vec<Vec<(usize, f64, usize)>>;

fn tied(a: f64, b: f64) -> bool {
    b.is_finite() && (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs()).max(1.0)
}

/// Per vertex, the `(predecessor, arc id)` pairs on shortest paths.
type Preds = Vec<Vec<(usize, usize)>>;

/// Dijkstra returning distances, tied predecessor arcs, and processing order.
fn dijkstra(adj: &Adj, src: usize) -> (Vec<f64>, Preds, Vec<usize>) {
    let n = adj.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut preds: Preds = vec![vec![]; n];
    let mut done = vec![false; n];
    let mut order = vec![];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Item(0.0, src));
    while let Some(Item(d, x)) = heap.pop() {
        if done[x] || d > dist[x] {
            continue;
        }
        done[x] = true;
        order.push(x);
        for &(y, w, arc) in &adj[x] {
            if done[y] {
                continue;
            }
            let nd = d + w;
            if tied(nd, dist[y]) {
                preds[y].push((x, arc));
            } else if nd < dist[y] {
                dist[y] = nd;
                preds[y] = vec![(x, arc)];
                heap.push(Item(nd, y));
            }
        }
    }
    (dist, preds, order)
}

impl MetricGraph {
    /// Builds a graph on vertices `0..n` from `(u, v, length)` triples.
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::with_labels(labels, edges)
    }

    fn with_labels(labels: Vec<String>, raw: &[(usize, usize, f64)]) -> Result<Self> {
        let n = labels.len();
        if raw.is_empty() {
            return Err(Error::InvalidFiber("graph has no edges".into()));
        }
        let mut edges = Vec::with_capacity(raw.len());
        let mut incident = vec![vec![]; n];
        for (i, &(u, v, w)) in raw.iter().enumerate() {
            if u >= n || v >= n {
                return Err(Error::InvalidFiber(format!("edge {i} references a missing vertex")));
            }
            if u == v {
                return Err(Error::InvalidFiber(format!("edge {i} is a loop at {}", labels[u])));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidFiber(format!("edge {i} has non-positive length {w}")));
            }
            edges.push(Edge { u, v, w });
            incident[u].push(i);
            incident[v].push(i);
        }
        let mut adj: Adj = vec![vec![]; n];
        for (i, e) in edges.iter().enumerate() {
            adj[e.u].push((e.v, e.w, i));
            adj[e.v].push((e.u, e.w, i));
        }
        let dist: Vec<Vec<f64>> = (0..n).map(|s| dijkstra(&adj, s).0).collect();
        if let Some(j) = dist[0].iter().position(|d| !d.is_finite()) {
            return Err(Error::InvalidFiber(format!("graph is disconnected: {} unreachable from {}", labels[j], labels[0])));
        }
        Ok(MetricGraph { labels, edges, incident, dist, tie_break: TieBreak::Canonical })
    }

    /// Parses `u v length` lines; labels are arbitrary tokens, `#` starts a comment.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut labels = vec![];
        let mut raw = vec![];
        for (ln, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(Error::InvalidFiber(format!("edge list line {}: expected `u v length`", ln + 1)));
            }
            let mut id = |t: &str| {
                *index.entry(t.to_string()).or_insert_with(|| {
                    labels.push(t.to_string());
                    labels.len() - 1
                })
            };
            let (u, v) = (id(toks[0]), id(toks[1]));
            let w: f64 = toks[2]
                .parse()
                .map_err(|_| Error::InvalidFiber(format!("edge list line {}: bad length {:?}", ln + 1, toks[2])))?;
            raw.push((u, v, w));
        }
        Self::with_labels(labels, &raw)
    }

    /// Star with three legs of length `leg` joined at vertex `0`.
    pub fn tripod(leg: f64) -> Result<Self> {
        Self::new(4, &[(0, 1, leg), (0, 2, leg), (0, 3, leg)])
    }

    pub fn with_tie_break(mut self, tie_break: TieBreak) -> Self {
        self.tie_break = tie_break;
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident[v].len()
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        self.edges[e].w
    }

    pub fn vertex_distance(&self, u: usize, v: usize) -> f64 {
        self.dist[u][v]
    }

    /// Canonical point for vertex `v`.
    pub fn vertex_point(&self, v: usize) -> GraphPoint {
        let e = self.incident[v].iter().copied().min().expect("connected graphs have no isolated vertices");
        let edge = self.edges[e];
        GraphPoint { edge: e, offset: if edge.u == v { 0.0 } else { edge.w } }
    }

    /// Point at `offset` along edge `edge`, canonicalized at vertices.
    pub fn point(&self, edge: usize, offset: f64) -> Result<GraphPoint> {
        let p = GraphPoint { edge, offset };
        self.validate_point(&p)?;
        Ok(self.canonical(&p))
    }

    pub fn canonical(&self, p: &GraphPoint) -> GraphPoint {
        match self.locate(p) {
            Loc::Vertex(v) => self.vertex_point(v),
            Loc::Interior(..) => *p,
        }
    }

    fn locate(&self, p: &GraphPoint) -> Loc {
        let e = self.edges[p.edge];
        let eps = TIE_TOLERANCE * e.w.max(1.0);
        if p.offset <= eps {
            Loc::Vertex(e.u)
        } else if p.offset >= e.w - eps {
            Loc::Vertex(e.v)
        } else {
            Loc::Interior(p.edge, p.offset)
        }
    }

    /// Nearest-vertex distances: `[(u, offset), (v, w - offset)]`.
    fn ends(&self, p: &GraphPoint) -> [(usize, f64); 2] {
        let e = self.edges[p.edge];
        [(e.u, p.offset), (e.v, e.w - p.offset)]
    }

    /// Shortest route as legs along original edges, honoring the tie-break rule.
    fn route(&self, p: &GraphPoint, q: &GraphPoint) -> Result<Vec<Leg>> {
        let (lp, lq) = (self.locate(p), self.locate(q));
        let n = self.vertex_count();
        // Node ids: vertices, then p and q when they sit inside edges.
        let node_of = |l: Loc, slot: usize| match l {
            Loc::Vertex(v) => v,
            Loc::Interior(..) => n + slot,
        };
        let (src, dst) = (node_of(lp, 0), node_of(lq, 1));
        if lp == lq {
            return Ok(vec![]);
        }
        let mut arcs: Vec<(usize, usize, f64, Leg)> = vec![];
        for (i, e) in self.edges.iter().enumerate() {
            let mut stops = vec![(0.0, e.u)];
            for (l, slot) in [(lp, 0), (lq, 1)] {
                if let Loc::Interior(edge, off) = l {
                    if edge == i {
                        stops.push((off, n + slot));
                    }
                }
            }
            stops.push((e.w, e.v));
            stops.sort_by(|a, b| a.0.total_cmp(&b.0));
            for w in stops.windows(2) {
                let ((o0, a), (o1, b)) = (w[0], w[1]);
                if o1 > o0 {
                    arcs.push((a, b, o1 - o0, Leg { edge: i, from: o0, to: o1 }));
                }
            }
        }
        let mut adj: Adj = vec![vec![]; n + 2];
        for (k, &(a, b, len, _)) in arcs.iter().enumerate() {
            adj[a].push((b, len, k));
            adj[b].push((a, len, k));
        }
        let (_, preds, order) = dijkstra(&adj, src);
        let mut count = vec![0u32; n + 2];
        count[src] = 1;
        for &x in &order {
            if x != src {
                count[x] = preds[x].iter().map(|&(y, _)| count[y]).sum::<u32>().min(2);
            }
        }
        if count[dst] > 1 && self.tie_break == TieBreak::Reject {
            return Err(Error::AmbiguousGeodesic(format!("several minimizing routes between {p:?} and {q:?}")));
        }
        let mut legs = vec![];
        let mut x = dst;
        while x != src {
            let options = &preds[x];
            let &(y, arc) = match self.tie_break {
                TieBreak::Seeded(seed) => &options[(seed as usize ^ x.wrapping_mul(0x9E37)) % options.len()],
                _ => options.iter().min_by_key(|&&(y, arc)| (arcs[arc].3.edge, y)).expect("reachable node"),
            };
            let (a, _, _, leg) = arcs[arc];
            legs.push(if a == y { leg } else { Leg { edge: leg.edge, from: leg.to, to: leg.from } });
            x = y;
        }
        legs.reverse();
        Ok(legs)
    }
}

impl FiberSpace for MetricGraph {
    type Point = GraphPoint;

    fn name(&self) -> String {
        format!("graph({} vertices, {} edges)", self.vertex_count(), self.edge_count())
    }

    fn distance(&self, p: &GraphPoint, q: &GraphPoint) -> f64 {
        let mut best = f64::INFINITY;
        if p.edge == q.edge {
            best = (p.offset - q.offset).abs();
        }
        for (a, da) in self.ends(p) {
            for (b, db) in self.ends(q) {
                best = best.min(da + self.dist[a][b] + db);
            }
        }
        best
    }

    fn geodesic_point(&self, p: &GraphPoint, q: &GraphPoint, u: f64) -> Result<GraphPoint> {
        check_fraction(u)?;
        let legs = self.route(p, q)?;
        let total: f64 = legs.iter().map(|l| (l.to - l.from).abs()).sum();
        let mut s = u * total;
        if u == 1.0 {
            return Ok(self.canonical(q));
        }
        for leg in &legs {
            let len = (leg.to - leg.from).abs();
            if s <= len {
                let off = leg.from + (leg.to - leg.from).signum() * s;
                return Ok(self.canonical(&GraphPoint { edge: leg.edge, offset: off }));
            }
            s -= len;
        }
        Ok(self.canonical(q))
    }

    fn validate_point(&self, p: &GraphPoint) -> Result<()> {
        let e = self
            .edges
            .get(p.edge)
            .ok_or_else(|| Error::InvalidPoint(format!("edge {} does not exist", p.edge)))?;
        if !(p.offset >= 0.0 && p.offset <= e.w) {
            return Err(Error::InvalidPoint(format!("offset {} outside [0, {}] on edge {}", p.offset, e.w, p.edge)));
        }
        Ok(())
    }

    fn encode(&self, p: &GraphPoint) -> Vec<String> {
        vec![format!("{}:{}", p.edge, crate::report::fmt_num(p.offset))]
    }

    /// `edge:offset`, or `v:label` for a vertex.
    fn decode(&self, fields: &[&str]) -> Result<GraphPoint> {
        if fields.len() != 1 {
            return Err(Error::InvalidPoint("graph point is a single `edge:offset` field".into()));
        }
        let f = fields[0].trim();
        if let Some(label) = f.strip_prefix("v:") {
            let v = self
                .labels
                .iter()
                .position(|l| l == label)
                .ok_or_else(|| Error::InvalidPoint(format!("no vertex labelled {label:?}")))?;
            return Ok(self.vertex_point(v));
        }
        let (e, o) = f
            .split_once(':')
            .ok_or_else(|| Error::InvalidPoint(format!("expected `edge:offset`, got {f:?}")))?;
        let edge: usize = e.parse().map_err(|_| Error::InvalidPoint(format!("bad edge id {e:?}")))?;
        self.point(edge, parse_f64(o)?)
    }
}

impl SampleFiber for MetricGraph {
    /// Vertices are drawn half of the time so that branch points are exercised.
    fn random_point(&self, rng: &mut dyn RngCore) -> GraphPoint {
        if rng.gen_bool(0.5) {
            return self.vertex_point(rng.gen_range(0..self.vertex_count()));
        }
        let total: f64 = self.edges.iter().map(|e| e.w).sum();
        let mut s = rng.gen_range(0.0..total);
        for (i, e) in self.edges.iter().enumerate() {
            if s < e.w {
                return self.canonical(&GraphPoint { edge: i, offset: s });
            }
            s -= e.w;
        }
        self.vertex_point(0)
    }

    /// Random walk of length at most `radius` that never turns back on an edge.
    fn random_point_near(&self, c: &GraphPoint, radius: f64, rng: &mut dyn RngCore) -> GraphPoint {
        let mut rho = radius * rng.gen::<f64>();
        let (mut edge, mut off, mut dir) = match self.locate(c) {
            Loc::Vertex(v) => {
                let inc = &self.incident[v];
                let e = inc[rng.gen_range(0..inc.len())];
                let ed = self.edges[e];
                if ed.u == v {
                    (e, 0.0, 1.0)
                } else {
                    (e, ed.w, -1.0)
                }
            }
            Loc::Interior(e, o) => (e, o, if rng.gen_bool(0.5) { 1.0 } else { -1.0 }),
        };
        loop {
            let e = self.edges[edge];
            let room = if dir > 0.0 { e.w - off } else { off };
            if rho <= room {
                return self.canonical(&GraphPoint { edge, offset: off + dir * rho });
            }
            rho -= room;
            let x = if dir > 0.0 { e.v } else { e.u };
            let next: Vec<usize> = self.incident[x].iter().copied().filter(|&k| k != edge).collect();
            if next.is_empty() {
                return self.vertex_point(x);
            }
            edge = next[rng.gen_range(0..next.len())];
            let ne = self.edges[edge];
            if ne.u == x {
                off = 0.0;
                dir = 1.0;
            } else {
                off = ne.w;
                dir = -1.0;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn path_graph_distances() {
        let g = MetricGraph::parse_edge_list("a b 1\nb c 2\n").unwrap();
        let a = g.vertex_point(0);
        let c = g.vertex_point(2);
        assert_eq!(g.distance(&a, &c), 3.0);
        let mid = g.geodesic_point(&a, &c, 0.5).unwrap();
        assert_eq!(mid, GraphPoint { edge: 1, offset: 0.5 });
    }

    #[test]
    fn vertex_canonicalization() {
        let g = MetricGraph::parse_edge_list("a b 1\nb c 2\n").unwrap();
        let b1 = g.point(0, 1.0).unwrap();
        let b2 = g.point(1, 0.0).unwrap();
        assert_eq!(b1, b2);
        assert_eq!(b1, GraphPoint { edge: 0, offset: 1.0 });
    }

    #[test]
    fn same_edge_points_and_short_cycles() {
        // Triangle with one long edge: the short way round wins.
        let g = MetricGraph::new(3, &[(0, 1, 5.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        let p = g.point(0, 0.5).unwrap();
        let q = g.point(0, 4.5).unwrap();
        assert!((g.distance(&p, &q) - 3.0).abs() < 1e-15);
        let m = g.geodesic_point(&p, &q, 0.5).unwrap();
        assert!((g.distance(&p, &m) - 1.5).abs() < 1e-12);
        assert_eq!(m, g.vertex_point(2));
    }

    #[test]
    fn ties_on_even_cycle() {
        let g = MetricGraph::new(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]).unwrap();
        let (a, c) = (g.vertex_point(0), g.vertex_point(2));
        let m = g.geodesic_point(&a, &c, 0.25).unwrap();
        assert_eq!(m, GraphPoint { edge: 0, offset: 0.5 });
        let strict = g.clone().with_tie_break(TieBreak::Reject);
        assert!(matches!(strict.geodesic_point(&a, &c, 0.25), Err(Error::AmbiguousGeodesic(_))));
        // Adjacent vertices have a unique route even on the cycle.
        assert!(strict.geodesic_point(&a, &g.vertex_point(1), 0.5).is_ok());
    }

    #[test]
    fn disconnected_rejected() {
        assert!(MetricGraph::parse_edge_list("a b 1\nc d 1\n").is_err());
        assert!(MetricGraph::parse_edge_list("a b -1\n").is_err());
    }

    #[test]
    fn walks_stay_within_radius() {
        let g = MetricGraph::tripod(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let c = g.random_point(&mut rng);
            let p = g.random_point_near(&c, 0.3, &mut rng);
            g.validate_point(&p).unwrap();
            assert!(g.distance(&c, &p) <= 0.3 + 1e-12);
        }
    }
}
