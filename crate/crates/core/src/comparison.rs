//! Triangle comparison: lift small fiber triangles into the cone, realize
//! their comparison triangles in `L2(K')` and compare time separations of
//! corresponding points. Verdicts are sampled falsification checks.

use crate::cone::{CausalPath, ConePoint, GeneralizedCone, ProfileKind};
use crate::error::{Error, Result};
use crate::fiber::{realize_metric_triangle, FiberSpace, ModelSurface, SampleFiber};
use crate::lorentz_model::{LorentzModel, Side};
use crate::report::{csv_row, fmt_num};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub use crate::lorentz_model::size_bounds_check;

/// Direction of a curvature bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Below,
    Above,
}

impl Direction {
    pub fn name(&self) -> &'static str {
        match self {
            Direction::Below => "below",
            Direction::Above => "above",
        }
    }

    /// Signed violation: positive when `value` breaks the bound against `model`.
    /// For cones `below` means `tau <= tau'`; for fibers it means `d >= d'`.
    fn violation(&self, value: f64, model: f64, fiber_side: bool) -> f64 {
        let below = (value - model) * if fiber_side { -1.0 } else { 1.0 };
        match self {
            Direction::Below => below,
            Direction::Above => -below,
        }
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "below" => Ok(Direction::Below),
            "above" => Ok(Direction::Above),
            _ => Err(Error::Precondition(format!("direction must be below or above, got {s:?}"))),
        }
    }
}

/// A lifted triangle `x << y << z` with realized sides.
#[derive(Debug, Clone)]
pub struct TimelikeTriangle<P> {
    pub x: ConePoint<P>,
    pub y: ConePoint<P>,
    pub z: ConePoint<P>,
    /// `tau(x, y)`, `tau(y, z)`, `tau(x, z)`.
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Sampled maximizers `xy`, `yz`, `xz`.
    pub sides: [CausalPath<P>; 3],
    /// `-1 + (max f)^2 (diam / eps)^2` for the straight pre-lift; at most `-1/2`.
    pub prelift_radicand: f64,
}

/// Samples per realized side.
pub const SIDE_SAMPLES: usize = 33;

/// Lifts `(x̄, ȳ, z̄)` to `x = (t0 - eps, x̄)`, `y = (t0, ȳ)`, `z = (t0 + eps, z̄)`.
/// Requires `diam <= eps / (2 sqrt 2 f(t0))` and `f <= 2 f(t0)` on the window.
pub fn lift_fiber_triangle<X: FiberSpace>(
    cone: &GeneralizedCone<X>,
    fiber_triangle: [&X::Point; 3],
    t0: f64,
    eps: f64,
) -> Result<TimelikeTriangle<X::Point>> {
    let w = cone.warp();
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("eps must be positive, got {eps}")));
    }
    let iv = w.interval();
    if !(t0 - eps > iv.a && t0 + eps < iv.b) {
        return Err(Error::Precondition(format!("[{}, {}] is not inside ({}, {})", t0 - eps, t0 + eps, iv.a, iv.b)));
    }
    let fiber = cone.fiber();
    let [xb, yb, zb] = fiber_triangle;
    let diam = fiber.distance(xb, yb).max(fiber.distance(yb, zb)).max(fiber.distance(xb, zb));
    let f0 = w.value(t0)?;
    let bound = eps / (2.0 * 2f64.sqrt() * f0);
    if diam > bound * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("fiber triangle diameter {diam} exceeds {bound}")));
    }
    let fmax = w.max_on(t0 - eps, t0 + eps);
    if fmax > 2.0 * f0 {
        return Err(Error::Precondition(format!("f varies too much on the window: max {fmax} > 2 f(t0) = {}", 2.0 * f0)));
    }
    let prelift_radicand = -1.0 + (fmax * diam / eps).powi(2);
    debug_assert!(prelift_radicand <= -0.5 + 1e-9);
    let x = cone.point(t0 - eps, xb.clone())?;
    let y = cone.point(t0, yb.clone())?;
    let z = cone.point(t0 + eps, zb.clone())?;
    let timelike = |p: &ConePoint<X::Point>, q: &ConePoint<X::Point>| -> Result<f64> {
        let prof = cone.tau_profile(p.t, q.t, fiber.distance(&p.x, &q.x))?;
        match prof.kind {
            ProfileKind::Timelike { .. } | ProfileKind::Vertical => Ok(prof.tau),
            _ => Err(Error::Precondition("lifted vertices are not timelike related".into())),
        }
    };
    let (a, b, c) = (timelike(&x, &y)?, timelike(&y, &z)?, timelike(&x, &z)?);
    let sides = [
        cone.maximizing_geodesic(&x, &y, SIDE_SAMPLES)?,
        cone.maximizing_geodesic(&y, &z, SIDE_SAMPLES)?,
        cone.maximizing_geodesic(&x, &z, SIDE_SAMPLES)?,
    ];
    Ok(TimelikeTriangle { x, y, z, a, b, c, sides, prelift_radicand })
}

/// One compared pair of corresponding points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRow {
    pub triangle: usize,
    /// Parameter of `p` on side `xy` and of `q` on side `yz` (proper time on
    /// the cone side, fraction on the fiber side).
    pub s_p: f64,
    pub s_q: f64,
    pub value: f64,
    pub model: f64,
    /// `value - model`.
    pub gap: f64,
    /// Both pairs timelike related (cone side) or always (fiber side).
    pub counted: bool,
}

/// Compares `tau(p, q)` with `tau'(p', q')` for `p` on `xy`, `q` on `yz`
/// at `pair_samples` parameters per side, vertices included.
pub fn compare_corresponding_points<X: FiberSpace>(
    cone: &GeneralizedCone<X>,
    tri: &TimelikeTriangle<X::Point>,
    k_prime: f64,
    pair_samples: usize,
) -> Result<Vec<PairRow>> {
    let model = LorentzModel::new(k_prime)?;
    let mt = model.realize_triangle(tri.a, tri.b, tri.c)?;
    let n = pair_samples.max(2);
    let mxy = cone.maximizer(&tri.x, &tri.y)?;
    let myz = cone.maximizer(&tri.y, &tri.z)?;
    let thr = 1e-9 * tri.c;
    let mut rows = Vec::with_capacity(n * n);
    for i in 0..n {
        let sp = tri.a * i as f64 / (n - 1) as f64;
        let p = mxy.point_at_length(sp)?;
        let pm = model.corresponding_point(&mt, Side::XY, sp)?;
        for j in 0..n {
            let sq = tri.b * j as f64 / (n - 1) as f64;
            let q = myz.point_at_length(sq)?;
            let qm = model.corresponding_point(&mt, Side::YZ, sq)?;
            let value = cone.time_separation(&p, &q)?;
            let m = model.tau(&pm, &qm)?;
            rows.push(PairRow { triangle: 0, s_p: sp, s_q: sq, value, model: m, gap: value - m, counted: value > thr && m > thr });
        }
    }
    Ok(rows)
}

/// Fiber-side comparison of `d(p̄, q̄)` against the model surface `M2(K)` for
/// `p̄` on `x̄ȳ` and `q̄` on `ȳz̄` at matching fractions.
pub fn compare_fiber_points<X: FiberSpace>(fiber: &X, pts: [&X::Point; 3], k: f64, pair_samples: usize) -> Result<Vec<PairRow>> {
    let [xb, yb, zb] = pts;
    let (dxy, dxz, dyz) = (fiber.distance(xb, yb), fiber.distance(xb, zb), fiber.distance(yb, zb));
    let surf = ModelSurface::new(k)?;
    let [xm, ym, zm] = realize_metric_triangle(k, dxy, dxz, dyz)?;
    let n = pair_samples.max(2);
    let mut rows = Vec::with_capacity(n * n);
    for i in 0..n {
        let u = i as f64 / (n - 1) as f64;
        let p = fiber.geodesic_point(xb, yb, u)?;
        let pm = surf.geodesic_point(&xm, &ym, u)?;
        for j in 0..n {
            let v = j as f64 / (n - 1) as f64;
            let q = fiber.geodesic_point(yb, zb, v)?;
            let qm = surf.geodesic_point(&ym, &zm, v)?;
            let (d, dm) = (fiber.distance(&p, &q), surf.distance(&pm, &qm));
            rows.push(PairRow { triangle: 0, s_p: u, s_q: v, value: d, model: dm, gap: d - dm, counted: true });
        }
    }
    Ok(rows)
}

/// Random triangle sampling parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampling {
    pub n_triangles: usize,
    /// Range for the middle time `t0`; the warp's default window when `None`.
    pub t_window: Option<(f64, f64)>,
    /// Half height of lifted triangles; a twentieth of the window (at most 0.25) when `None`.
    pub eps: Option<f64>,
    /// Fiber diameter as a fraction of the lifting bound.
    pub fiber_scale: f64,
    pub pair_samples: usize,
    pub seed: u64,
    /// Relative tolerance; gaps are divided by the triangle size `c` (cone) or
    /// its longest side (fiber).
    pub tolerance: f64,
    pub max_attempts: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            n_triangles: 200,
            t_window: None,
            eps: None,
            fiber_scale: 0.1,
            pair_samples: 5,
            seed: 0,
            tolerance: 1e-5,
            max_attempts: 50,
        }
    }
}

/// Offending pair of the worst violation.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub triangle: usize,
    /// Vertices as `t;coords`.
    pub vertices: [String; 3],
    pub row: PairRow,
}

/// Outcome of a sampled curvature-bound check.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureReport {
    pub fiber_side: bool,
    pub direction: Direction,
    pub k: f64,
    pub tolerance: f64,
    pub triangles: usize,
    pub pairs: usize,
    pub counted: usize,
    /// Pairs related on exactly one side (informational).
    pub mismatches: usize,
    /// Largest signed violation; positive breaks the bound.
    pub worst_gap: f64,
    /// `worst_gap` over the triangle size.
    pub worst_relative: f64,
    pub witness: Option<Witness>,
    pub violated: bool,
    pub rows: Vec<PairRow>,
}

impl CurvatureReport {
    pub fn verdict(&self) -> &'static str {
        if self.violated {
            "violated"
        } else {
            "consistent"
        }
    }

    /// Largest `|value - model|` over counted pairs.
    pub fn max_abs_gap(&self) -> f64 {
        self.rows.iter().filter(|r| r.counted).map(|r| r.gap.abs()).fold(0.0, f64::max)
    }

    pub const CSV_HEADER: &'static str = "triangle,s_p,s_q,value,model,gap,counted";

    /// One row per tested pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&csv_row(&[
                r.triangle.to_string(),
                fmt_num(r.s_p),
                fmt_num(r.s_q),
                fmt_num(r.value),
                fmt_num(r.model),
                fmt_num(r.gap),
                (r.counted as u8).to_string(),
            ]));
            out.push('\n');
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "side: {}\ndirection: {}\nK: {}\ntriangles: {}\npairs: {}\ncounted: {}\nmismatches: {}\nworst_gap: {}\nworst_relative: {}\ntolerance: {}\nverdict: {}\n",
            if self.fiber_side { "fiber" } else { "cone" },
            self.direction.name(),
            fmt_num(self.k),
            self.triangles,
            self.pairs,
            self.counted,
            self.mismatches,
            fmt_num(self.worst_gap),
            fmt_num(self.worst_relative),
            fmt_num(self.tolerance),
            self.verdict()
        );
        if let Some(w) = &self.witness {
            s.push_str(&format!(
                "witness_triangle: {}\nwitness_vertices: {} | {} | {}\nwitness_pair: s_p={} s_q={} value={} model={}\n",
                w.triangle,
                w.vertices[0],
                w.vertices[1],
                w.vertices[2],
                fmt_num(w.row.s_p),
                fmt_num(w.row.s_q),
                fmt_num(w.row.value),
                fmt_num(w.row.model)
            ));
        }
        s
    }
}

/// Both reports of [`fiber_bound_from_cone`].
#[derive(Debug, Clone, PartialEq)]
pub struct FiberBoundReport {
    pub fiber: CurvatureReport,
    pub cone: CurvatureReport,
}

/// Runs `f` on a pool capped by `LORCONE_THREADS` when set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var("LORCONE_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()).filter(|&n| n > 0);
    match cap.map(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build()) {
        Some(Ok(pool)) => pool.install(f),
        _ => f(),
    }
}

fn encode_point<X: FiberSpace>(fiber: &X, p: &ConePoint<X::Point>) -> String {
    format!("{};{}", fmt_num(p.t), fiber.encode(&p.x).join(","))
}

struct Drawn<P> {
    tri: TimelikeTriangle<P>,
    fiber: [P; 3],
}

fn draw_triangle<X: SampleFiber>(
    cone: &GeneralizedCone<X>,
    sampling: &Sampling,
    index: usize,
) -> std::result::Result<Drawn<X::Point>, usize> {
    let w = cone.warp();
    let (lo, hi) = sampling.t_window.unwrap_or_else(|| w.default_window());
    let eps0 = sampling.eps.unwrap_or_else(|| (0.05 * (hi - lo)).min(0.25));
    let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
    rng.set_stream(index as u64);
    for attempt in 0..sampling.max_attempts.max(1) {
        let mut eps = eps0;
        if hi - lo <= 2.0 * eps {
            return Err(attempt + 1);
        }
        let t0 = rng.gen_range(lo + eps..hi - eps);
        // Shrink the height until f is tame on the window.
        while eps > 1e-6 * eps0 && w.max_on(t0 - eps, t0 + eps) > 2.0 * w.f(t0) {
            eps *= 0.5;
        }
        let radius = 0.5 * sampling.fiber_scale * eps / (2.0 * 2f64.sqrt() * w.f(t0));
        let fiber = cone.fiber();
        let center = fiber.random_point(&mut rng);
        let pts = [
            fiber.random_point_near(&center, radius, &mut rng),
            fiber.random_point_near(&center, radius, &mut rng),
            fiber.random_point_near(&center, radius, &mut rng),
        ];
        if let Ok(tri) = lift_fiber_triangle(cone, [&pts[0], &pts[1], &pts[2]], t0, eps) {
            return Ok(Drawn { tri, fiber: pts });
        }
        if attempt + 1 == sampling.max_attempts {
            return Err(attempt + 1);
        }
    }
    Err(sampling.max_attempts)
}

fn aggregate(
    direction: Direction,
    k: f64,
    fiber_side: bool,
    tolerance: f64,
    per_triangle: Vec<(Vec<PairRow>, f64, [String; 3])>,
) -> CurvatureReport {
    let mut rep = CurvatureReport {
        fiber_side,
        direction,
        k,
        tolerance,
        triangles: per_triangle.len(),
        pairs: 0,
        counted: 0,
        mismatches: 0,
        worst_gap: f64::NEG_INFINITY,
        worst_relative: f64::NEG_INFINITY,
        witness: None,
        violated: false,
        rows: vec![],
    };
    for (i, (rows, size, verts)) in per_triangle.into_iter().enumerate() {
        for mut r in rows {
            r.triangle = i;
            rep.pairs += 1;
            if r.counted {
                rep.counted += 1;
                let v = direction.violation(r.value, r.model, fiber_side);
                let rel = v / size.max(f64::MIN_POSITIVE);
                if rel > rep.worst_relative {
                    rep.worst_relative = rel;
                    rep.worst_gap = v;
                    rep.witness = Some(Witness { triangle: i, vertices: verts.clone(), row: r });
                }
            } else if (r.value > 0.0) != (r.model > 0.0) {
                rep.mismatches += 1;
            }
            rep.rows.push(r);
        }
    }
    rep.violated = rep.worst_relative > tolerance;
    if !rep.violated {
        rep.witness = None;
    }
    if rep.counted == 0 {
        rep.worst_gap = 0.0;
        rep.worst_relative = 0.0;
    }
    rep
}

fn collect_triangles<X: SampleFiber>(
    cone: &GeneralizedCone<X>,
    sampling: &Sampling,
) -> Result<Vec<Drawn<X::Point>>> {
    let drawn: Vec<_> = with_thread_cap(|| {
        (0..sampling.n_triangles).into_par_iter().map(|i| draw_triangle(cone, sampling, i)).collect()
    });
    let attempts: usize = drawn.iter().map(|d| match d {
        Ok(_) => 1,
        Err(n) => *n,
    }).sum();
    let accepted = drawn.iter().filter(|d| d.is_ok()).count();
    if accepted < sampling.n_triangles {
        return Err(Error::SamplingExhausted { attempts, accepted });
    }
    Ok(drawn.into_iter().filter_map(|d| d.ok()).collect())
}

/// Sampled check of a timelike curvature bound `K'` on the cone.
pub fn certify_bound<X: SampleFiber>(
    cone: &GeneralizedCone<X>,
    k_prime: f64,
    direction: Direction,
    sampling: &Sampling,
) -> Result<CurvatureReport> {
    if !cone.fiber().is_geodesic() {
        return Err(Error::NonGeodesicFiber);
    }
    let tris = collect_triangles(cone, sampling)?;
    let per: Vec<Result<_>> = with_thread_cap(|| {
        tris.par_iter()
            .map(|d| {
                let rows = compare_corresponding_points(cone, &d.tri, k_prime, sampling.pair_samples)?;
                let verts = [&d.tri.x, &d.tri.y, &d.tri.z].map(|p| encode_point(cone.fiber(), p));
                Ok((rows, d.tri.c, verts))
            })
            .collect()
    });
    let per = per.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(aggregate(direction, k_prime, false, sampling.tolerance, per))
}

/// Converse check: fiber triangles lifted into the cone are compared on the
/// fiber side against `M2(K)` and on the cone side against `L2(K')`.
pub fn fiber_bound_from_cone<X: SampleFiber>(
    cone: &GeneralizedCone<X>,
    k: f64,
    k_prime: f64,
    direction: Direction,
    sampling: &Sampling,
) -> Result<FiberBoundReport> {
    if !cone.fiber().is_geodesic() {
        return Err(Error::NonGeodesicFiber);
    }
    let tris = collect_triangles(cone, sampling)?;
    let per: Vec<Result<_>> = with_thread_cap(|| {
        tris.par_iter()
            .map(|d| {
                let fiber = cone.fiber();
                let pts = [&d.fiber[0], &d.fiber[1], &d.fiber[2]];
                let frows = compare_fiber_points(fiber, pts, k, sampling.pair_samples)?;
                let crows = compare_corresponding_points(cone, &d.tri, k_prime, sampling.pair_samples)?;
                let size = fiber
                    .distance(pts[0], pts[1])
                    .max(fiber.distance(pts[1], pts[2]))
                    .max(fiber.distance(pts[0], pts[2]));
                let fverts = pts.map(|p| fiber.encode(p).join(","));
                let cverts = [&d.tri.x, &d.tri.y, &d.tri.z].map(|p| encode_point(fiber, p));
                Ok(((frows, size, fverts), (crows, d.tri.c, cverts)))
            })
            .collect()
    });
    let per = per.into_iter().collect::<Result<Vec<_>>>()?;
    let (f, c): (Vec<_>, Vec<_>) = per.into_iter().unzip();
    Ok(FiberBoundReport {
        fiber: aggregate(direction, k, true, sampling.tolerance, f),
        cone: aggregate(direction, k_prime, false, sampling.tolerance, c),
    })
}

/// Two-model comparison: realizes `(a, b, c)` in `L2(k)` and `L2(k')` and
/// returns `(s, tau_k(x, q), tau_k'(x', q'))` for `q` at proper time `s`
/// on the side `yz`, interior points only.
pub fn model_sandwich(k: f64, k_prime: f64, a: f64, b: f64, c: f64, samples: usize) -> Result<Vec<(f64, f64, f64)>> {
    let (m, mp) = (LorentzModel::new(k)?, LorentzModel::new(k_prime)?);
    let (t, tp) = (m.realize_triangle(a, b, c)?, mp.realize_triangle(a, b, c)?);
    (1..=samples)
        .map(|i| {
            let s = b * i as f64 / (samples + 1) as f64;
            let q = m.corresponding_point(&t, Side::YZ, s)?;
            let qp = mp.corresponding_point(&tp, Side::YZ, s)?;
            Ok((s, m.tau(&t.x, &q)?, mp.tau(&tp.x, &qp)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::{EuclideanN, RealLine};
    use crate::warp::{Interval, WarpKind, WarpSpec};

    #[test]
    fn flat_lift_and_vertical_triangle() {
        let cone = GeneralizedCone::new(WarpSpec::constant(1.0, Interval::real_line()).unwrap(), EuclideanN::new(2).unwrap());
        let (a, b, c) = (vec![0.0, 0.0], vec![0.1, 0.05], vec![0.02, 0.12]);
        let tri = lift_fiber_triangle(&cone, [&a, &b, &c], 0.0, 1.0).unwrap();
        assert!(tri.c >= tri.a + tri.b);
        assert!(tri.prelift_radicand <= -0.5);
        let v = lift_fiber_triangle(&cone, [&a, &a, &a], 0.0, 1.0).unwrap();
        assert_eq!((v.a, v.b, v.c), (1.0, 1.0, 2.0));
        let rows = compare_corresponding_points(&cone, &v, 0.0, 5).unwrap();
        assert!(rows.iter().all(|r| r.gap.abs() < 1e-12));
        assert!(lift_fiber_triangle(&cone, [&a, &vec![1.0, 0.0], &a], 0.0, 1.0).is_err());
    }

    #[test]
    fn de_sitter_self_comparison() {
        let cone = GeneralizedCone::new(WarpSpec::new(WarpKind::Cosh, Interval::real_line()).unwrap(), RealLine);
        let tri = lift_fiber_triangle(&cone, [&0.0, &0.02, &-0.01], 0.3, 0.2).unwrap();
        let rows = compare_corresponding_points(&cone, &tri, 1.0, 4).unwrap();
        let worst = rows.iter().map(|r| r.gap.abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn sandwich_strict() {
        for (k, kp) in [(0.0, 1.0), (-1.0, 0.0)] {
            for (s, t, tp) in model_sandwich(k, kp, 0.3, 0.25, 0.6, 5).unwrap() {
                assert!(tp > t, "K={k} K'={kp} s={s}: {t} vs {tp}");
            }
        }
    }

    #[test]
    fn direction_signs() {
        assert!(Direction::Below.violation(2.0, 1.0, false) > 0.0);
        assert!(Direction::Above.violation(2.0, 1.0, false) < 0.0);
        assert!(Direction::Below.violation(1.0, 2.0, true) > 0.0);
    }
}
