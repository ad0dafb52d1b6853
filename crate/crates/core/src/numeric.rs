//! Quadrature and scalar root finding.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances for adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
    pub max_segments: usize,
}

impl Default for QuadTol {
    fn default() -> Self {
        QuadTol { abs: 1e-10, rel: 1e-10, max_segments: 2000 }
    }
}

impl QuadTol {
    pub fn tight() -> Self {
        QuadTol { abs: 1e-13, rel: 1e-12, max_segments: 4000 }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs_k = k.abs();
    let mut fv = [(0.0, 0.0); 7];
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        k += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            g += WG[j / 2] * (f1 + f2);
        }
        *slot = (f1, f2);
    }
    let mean = 0.5 * k;
    let mut asc = WGK[7] * (fc - mean).abs();
    for (j, (f1, f2)) in fv.iter().enumerate() {
        asc += WGK[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }
    let value = k * h;
    let asc = asc * h.abs();
    let abs_k = abs_k * h.abs();
    let mut err = ((k - g) * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_k > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_k);
    }
    (value, err)
}

/// Adaptive Gauss-Kronrod (7/15) integral of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: QuadTol) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (v, e) = kronrod15(&f, a, b);
    if !v.is_finite() {
        return Err(Error::Quadrature { a, b, value: v, error: e });
    }
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e });
    let (mut total, mut total_err) = (v, e);
    while total_err > tol.abs.max(tol.rel * total.abs()) {
        if heap.len() >= tol.max_segments {
            // Accept if the remaining error is at the level of rounding.
            if total_err <= 1e3 * f64::EPSILON * total.abs().max(1e-300) {
                break;
            }
            return Err(Error::Quadrature { a, b, value: total, error: total_err });
        }
        let s = heap.pop().expect("heap is non-empty");
        let m = 0.5 * (s.a + s.b);
        if m <= s.a.min(s.b) || m >= s.a.max(s.b) {
            heap.push(s);
            break;
        }
        let (v1, e1) = kronrod15(&f, s.a, m);
        let (v2, e2) = kronrod15(&f, m, s.b);
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(Error::Quadrature { a, b, value: total, error: total_err });
        }
        total += v1 + v2 - s.value;
        total_err += e1 + e2 - s.error;
        heap.push(Segment { a: s.a, b: m, value: v1, error: e1 });
        heap.push(Segment { a: m, b: s.b, value: v2, error: e2 });
    }
    // Re-sum to shed accumulated cancellation from the running updates.
    Ok(heap.iter().map(|s| s.value).sum())
}

/// Outcome of an improper integral toward an endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Improper {
    Converged(f64),
    Divergent,
}

/// Partial sums beyond this magnitude count as divergence.
pub const DIVERGENCE_CAP: f64 = 1e12;

/// Integrates a positive integrand from `from` toward `to` (finite or
/// infinite), where the integrand may blow up at `to`. Nodes approach `to`
/// geometrically; a stable piece ratio is extrapolated as a geometric tail and
/// a ratio that settles at one (or a sum past [`DIVERGENCE_CAP`]) is divergence.
pub fn improper<F: Fn(f64) -> f64>(f: F, from: f64, to: f64, tol: QuadTol) -> Result<Improper> {
    if from == to {
        return Ok(Improper::Converged(0.0));
    }
    let q = std::f64::consts::FRAC_1_SQRT_2;
    let dir = if to > from { 1.0 } else { -1.0 };
    let width = if to.is_finite() { (to - from).abs() } else { from.abs().max(1.0) };
    let node = |k: i32| -> f64 {
        if to.is_finite() {
            to - (to - from) * q.powi(k)
        } else {
            from + dir * width * (q.powi(-k) - 1.0)
        }
    };
    let mut sum = 0.0;
    let mut prev_piece = f64::NAN;
    let mut ratios: Vec<f64> = Vec::new();
    let mut k = 0;
    loop {
        let (r0, r1) = (node(k), node(k + 1));
        let exhausted = if to.is_finite() {
            (to - r1).abs() <= 8.0 * f64::EPSILON * to.abs().max(1.0) || r1 == r0
        } else {
            r1.abs() > 1e300
        };
        if exhausted {
            let rho = ratios.last().copied().unwrap_or(1.0);
            return Ok(if rho < 0.99 {
                Improper::Converged((sum + prev_piece * rho / (1.0 - rho)) * dir)
            } else {
                Improper::Divergent
            });
        }
        let piece = match integrate(&f, r0, r1, QuadTol { abs: 0.0, ..tol }) {
            Ok(v) => v,
            // Close to a singular endpoint the integrand itself is noisy;
            // the estimate is still the best available piece.
            Err(Error::Quadrature { value, error, .. }) if value.is_finite() && error <= 1e-6 * value.abs() => value,
            Err(e) => return Err(e),
        } * dir;
        sum += piece;
        if !sum.is_finite() || sum.abs() > DIVERGENCE_CAP {
            return Ok(Improper::Divergent);
        }
        if piece.abs() <= 1e-17 * sum.abs() {
            return Ok(Improper::Converged(sum * dir));
        }
        if prev_piece.is_finite() && prev_piece != 0.0 {
            ratios.push(piece / prev_piece);
        }
        prev_piece = piece;
        let n = ratios.len();
        if n >= 4 {
            let last = &ratios[n - 4..];
            if last.iter().all(|&r| r >= 1.0 - 1e-7) {
                return Ok(Improper::Divergent);
            }
            let rho = last[3];
            let stable = last.windows(2).all(|w| (w[1] - w[0]).abs() <= 0.005 * (1.0 - rho).abs());
            if stable && rho < 1.0 - 1e-3 && rho > 0.0 {
                let tail = piece * rho / (1.0 - rho);
                return Ok(Improper::Converged((sum + tail) * dir));
            }
        }
        k += 1;
        if k > 4000 {
            return Ok(Improper::Divergent);
        }
    }
}

/// Brent's method for a sign change of `f` on `[lo, hi]`.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::Root(format!("no sign change on [{lo}, {hi}] ({fa:e}, {fb:e})")));
    }
    let (mut c, mut fc) = (a, fa);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut qq);
            if a == c {
                p = 2.0 * xm * s;
                qq = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                qq = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                qq = -qq;
            }
            p = p.abs();
            let min1 = 3.0 * xm * qq - (tol1 * qq).abs();
            let min2 = (e * qq).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / qq;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::Root(format!("Brent iteration limit on [{lo}, {hi}]")))
}

/// Newton steps safeguarded by bisection for an increasing `g` with known
/// derivative on `[lo, hi]` where `g(lo) <= 0 <= g(hi)`.
pub fn newton_bracketed<G, D>(g: G, dg: D, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
    D: Fn(f64) -> f64,
{
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let gx = g(x)?;
        if gx == 0.0 {
            return Ok(x);
        }
        if gx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let slope = dg(x);
        let mut next = if slope.is_finite() && slope > 0.0 { x - gx / slope } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let scale = xtol * x.abs().max(1.0);
        if (next - x).abs() <= scale || hi - lo <= scale {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Root(format!("bracketed Newton did not settle in [{lo}, {hi}]")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_oscillatory_integrals() {
        let v = integrate(|x| x * x, 0.0, 3.0, QuadTol::default()).unwrap();
        assert!((v - 9.0).abs() < 1e-12);
        let v = integrate(f64::sin, 0.0, 20.0, QuadTol::tight()).unwrap();
        assert!((v - (1.0 - 20f64.cos())).abs() < 1e-11);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let v = integrate(f64::exp, 1.0, 0.0, QuadTol::default()).unwrap();
        assert!((v + (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn improper_classification() {
        let t = QuadTol::default();
        match improper(|t| (-t).exp(), 0.0, f64::INFINITY, t).unwrap() {
            Improper::Converged(v) => assert!((v - 1.0).abs() < 1e-9),
            d => panic!("{d:?}"),
        }
        assert_eq!(improper(|t| 1.0 / t, 1.0, f64::INFINITY, t).unwrap(), Improper::Divergent);
        assert_eq!(improper(|_| 1.0, 0.0, f64::INFINITY, t).unwrap(), Improper::Divergent);
        assert_eq!(improper(|t: f64| 1.0 / t.sin(), 1.0, std::f64::consts::PI, t).unwrap(), Improper::Divergent);
        match improper(|t: f64| t.powf(-2.0 / 3.0), 1.0, 0.0, t).unwrap() {
            Improper::Converged(v) => assert!((v + 3.0).abs() < 1e-8, "{v}"),
            d => panic!("{d:?}"),
        }
        match improper(|t: f64| t.powf(-2.0), 1.0, f64::INFINITY, t).unwrap() {
            Improper::Converged(v) => assert!((v - 1.0).abs() < 1e-8, "{v}"),
            d => panic!("{d:?}"),
        }
    }

    #[test]
    fn brent_finds_cube_root() {
        let r = brent(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 50).is_err());
    }

    #[test]
    fn newton_bracketed_log() {
        let r = newton_bracketed(|x: f64| Ok(x.ln() - 1.0), |x| 1.0 / x, 1.0, 5.0, 1e-15).unwrap();
        assert!((r - std::f64::consts::E).abs() < 1e-13);
    }
}
