//! Warping functions `f: I -> (0, inf)` on an open interval, null transport
//! `h_{p0}`, horizons, K-concavity tests and endpoint singularity reports.

use crate::error::{Error, Result};
use crate::numeric::{self, Improper, QuadTol};
use std::f64::consts::{FRAC_PI_2, PI};

/// Open interval `(a, b)` with possibly infinite endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if a.is_nan() || b.is_nan() || a >= b {
            return Err(Error::InvalidWarp(format!("interval ({a}, {b}) is empty")));
        }
        Ok(Interval { a, b })
    }

    pub fn real_line() -> Self {
        Interval { a: f64::NEG_INFINITY, b: f64::INFINITY }
    }

    pub fn positive() -> Self {
        Interval { a: 0.0, b: f64::INFINITY }
    }

    pub fn contains(&self, t: f64) -> bool {
        t > self.a && t < self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_bounded(&self) -> bool {
        self.a.is_finite() && self.b.is_finite()
    }
}

/// Interpolation rule for tabulated warps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    #[default]
    Linear,
    /// Natural cubic spline; enables second derivatives.
    Spline,
}

/// Tabulated warp values on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    ts: Vec<f64>,
    fs: Vec<f64>,
    interp: Interpolation,
    m: Vec<f64>,
}

impl Sampled {
    pub fn new(ts: Vec<f64>, fs: Vec<f64>, interp: Interpolation) -> Result<Self> {
        if ts.len() != fs.len() || ts.len() < 2 {
            return Err(Error::InvalidWarp("sampled warp needs at least two (t, f) pairs".into()));
        }
        if ts.windows(2).any(|w| !(w[1] > w[0])) || ts.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidWarp("sample times must be finite and strictly increasing".into()));
        }
        if let Some(i) = fs.iter().position(|&f| !(f > 0.0 && f.is_finite())) {
            return Err(Error::InvalidWarp(format!("sample {i} has non-positive value {}", fs[i])));
        }
        let m = match interp {
            Interpolation::Linear => Vec::new(),
            Interpolation::Spline => natural_spline(&ts, &fs),
        };
        Ok(Sampled { ts, fs, interp, m })
    }

    pub fn times(&self) -> &[f64] {
        &self.ts
    }

    pub fn values(&self) -> &[f64] {
        &self.fs
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interp
    }

    fn piece(&self, t: f64) -> usize {
        let n = self.ts.len();
        match self.ts.partition_point(|&x| x <= t) {
            0 => 0,
            i if i >= n => n - 2,
            i => i - 1,
        }
    }

    fn eval(&self, t: f64) -> f64 {
        let i = self.piece(t);
        let (t0, t1) = (self.ts[i], self.ts[i + 1]);
        let h = t1 - t0;
        let b = (t - t0) / h;
        let a = 1.0 - b;
        let lin = a * self.fs[i] + b * self.fs[i + 1];
        match self.interp {
            Interpolation::Linear => lin,
            Interpolation::Spline => {
                lin + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
            }
        }
    }

    fn deriv(&self, t: f64) -> f64 {
        let i = self.piece(t);
        let h = self.ts[i + 1] - self.ts[i];
        let slope = (self.fs[i + 1] - self.fs[i]) / h;
        match self.interp {
            Interpolation::Linear => slope,
            Interpolation::Spline => {
                let b = (t - self.ts[i]) / h;
                let a = 1.0 - b;
                slope - (3.0 * a * a - 1.0) / 6.0 * h * self.m[i] + (3.0 * b * b - 1.0) / 6.0 * h * self.m[i + 1]
            }
        }
    }

    fn second(&self, t: f64) -> Option<f64> {
        match self.interp {
            Interpolation::Linear => None,
            Interpolation::Spline => {
                let i = self.piece(t);
                let b = (t - self.ts[i]) / (self.ts[i + 1] - self.ts[i]);
                Some((1.0 - b) * self.m[i] + b * self.m[i + 1])
            }
        }
    }

    /// Candidate extremum locations inside `[s, t]` (knots and spline turning points).
    fn critical_points(&self, s: f64, t: f64, out: &mut Vec<f64>) {
        for (i, &x) in self.ts.iter().enumerate() {
            if x > s && x < t {
                out.push(x);
            }
            if self.interp == Interpolation::Spline && i + 1 < self.ts.len() {
                let h = self.ts[i + 1] - x;
                let (al, be) = (h * self.m[i] / 6.0, h * self.m[i + 1] / 6.0);
                let d = (self.fs[i + 1] - self.fs[i]) / h;
                // S'(A) = 3(be - al) A^2 - 6 be A + (d + al + 2 be), with A = (t1 - t)/h.
                for a in quadratic_roots(3.0 * (be - al), -6.0 * be, d + al + 2.0 * be) {
                    if (0.0..=1.0).contains(&a) {
                        let tc = self.ts[i + 1] - a * h;
                        if tc > s && tc < t {
                            out.push(tc);
                        }
                    }
                }
            }
        }
    }
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a.abs() < 1e-300 {
        return if b.abs() < 1e-300 { vec![] } else { vec![-c / b] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    if q == 0.0 {
        return vec![0.0];
    }
    vec![q / a, c / q]
}

fn natural_spline(ts: &[f64], fs: &[f64]) -> Vec<f64> {
    let n = ts.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Thomas algorithm on the interior second derivatives.
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        let h0 = ts[i] - ts[i - 1];
        let h1 = ts[i + 1] - ts[i];
        let rhs = 6.0 * ((fs[i + 1] - fs[i]) / h1 - (fs[i] - fs[i - 1]) / h0);
        let diag = 2.0 * (h0 + h1) - h0 * c[i - 1];
        c[i] = h1 / diag;
        d[i] = (rhs - h0 * d[i - 1]) / diag;
    }
    for i in (1..n - 1).rev() {
        m[i] = d[i] - c[i] * m[i + 1];
    }
    m
}

/// Shape of a warping function. Closed forms are evaluated as
/// `amplitude * g(rate * t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum WarpKind {
    Constant,
    Identity,
    Sin,
    Cos,
    Cosh,
    Sinh,
    Exp,
    Power(f64),
    Sampled(Sampled),
}

impl WarpKind {
    pub fn name(&self) -> &'static str {
        match self {
            WarpKind::Constant => "constant",
            WarpKind::Identity => "identity",
            WarpKind::Sin => "sin",
            WarpKind::Cos => "cos",
            WarpKind::Cosh => "cosh",
            WarpKind::Sinh => "sinh",
            WarpKind::Exp => "exp",
            WarpKind::Power(_) => "power",
            WarpKind::Sampled(_) => "sampled",
        }
    }
}

/// A validated warping function on its interval.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpSpec {
    kind: WarpKind,
    amplitude: f64,
    rate: f64,
    interval: Interval,
}

impl WarpSpec {
    /// Builds `f = g` on `interval` and checks positivity.
    pub fn new(kind: WarpKind, interval: Interval) -> Result<Self> {
        Self::scaled(kind, 1.0, 1.0, interval)
    }

    /// Builds `f(t) = amplitude * g(rate * t)`.
    pub fn scaled(kind: WarpKind, amplitude: f64, rate: f64, interval: Interval) -> Result<Self> {
        let w = WarpSpec { kind, amplitude, rate, interval: Interval::new(interval.a, interval.b)? };
        w.validate()?;
        Ok(w)
    }

    pub fn constant(c: f64, interval: Interval) -> Result<Self> {
        Self::scaled(WarpKind::Constant, c, 1.0, interval)
    }

    pub fn kind(&self) -> &WarpKind {
        &self.kind
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn is_constant(&self) -> bool {
        match &self.kind {
            WarpKind::Constant => true,
            WarpKind::Power(p) => *p == 0.0,
            WarpKind::Sampled(s) => s.fs.windows(2).all(|w| w[0] == w[1]),
            _ => false,
        }
    }

    fn validate(&self) -> Result<()> {
        let Interval { a, b } = self.interval;
        let (amp, r) = (self.amplitude, self.rate);
        if !(amp > 0.0 && amp.is_finite()) {
            return Err(Error::InvalidWarp(format!("amplitude must be positive, got {amp}")));
        }
        if !(r.is_finite() && r != 0.0) {
            return Err(Error::InvalidWarp(format!("rate must be finite and non-zero, got {r}")));
        }
        let needs_positive_rate = !matches!(self.kind, WarpKind::Constant | WarpKind::Cosh | WarpKind::Exp);
        if needs_positive_rate && r < 0.0 {
            return Err(Error::InvalidWarp(format!("{} requires a positive rate", self.kind.name())));
        }
        let fail = |why: String| Err(Error::InvalidWarp(format!("{} is not positive on ({a}, {b}): {why}", self.kind.name())));
        match &self.kind {
            WarpKind::Constant | WarpKind::Cosh | WarpKind::Exp => Ok(()),
            WarpKind::Identity | WarpKind::Sinh => {
                if a < 0.0 {
                    return fail("left endpoint must be >= 0".into());
                }
                Ok(())
            }
            WarpKind::Power(p) => {
                if !p.is_finite() {
                    return fail("exponent must be finite".into());
                }
                if a < 0.0 {
                    return fail("left endpoint must be >= 0".into());
                }
                Ok(())
            }
            WarpKind::Sin | WarpKind::Cos => {
                if !self.interval.is_bounded() {
                    return fail("interval must be bounded".into());
                }
                let shift = if matches!(self.kind, WarpKind::Cos) { FRAC_PI_2 } else { 0.0 };
                let (u, v) = (r * a + shift, r * b + shift);
                let k = (u / (2.0 * PI) + 1e-12).floor();
                let (lo, hi) = (2.0 * k * PI, (2.0 * k + 1.0) * PI);
                let slack = 1e-12 * (1.0 + hi.abs());
                if u < lo - slack || v > hi + slack {
                    return fail(format!("argument range ({u:.6}, {v:.6}) leaves ({lo:.6}, {hi:.6})"));
                }
                Ok(())
            }
            WarpKind::Sampled(s) => {
                let (t0, t1) = (s.ts[0], *s.ts.last().unwrap());
                if a < t0 || b > t1 {
                    return Err(Error::InvalidWarp(format!("samples cover [{t0}, {t1}], not ({a}, {b})")));
                }
                if s.interp == Interpolation::Spline {
                    let mut cands = vec![];
                    s.critical_points(a, b, &mut cands);
                    if let Some(&t) = cands.iter().find(|&&t| s.eval(t) <= 0.0) {
                        return fail(format!("spline dips to {} at t = {t}", s.eval(t)));
                    }
                }
                Ok(())
            }
        }
    }

    fn base(&self, u: f64) -> f64 {
        match &self.kind {
            WarpKind::Constant => 1.0,
            WarpKind::Identity => u,
            WarpKind::Sin => u.sin(),
            WarpKind::Cos => u.cos(),
            WarpKind::Cosh => u.cosh(),
            WarpKind::Sinh => u.sinh(),
            WarpKind::Exp => u.exp(),
            WarpKind::Power(p) => u.powf(*p),
            WarpKind::Sampled(s) => s.eval(u),
        }
    }

    fn base_d1(&self, u: f64) -> f64 {
        match &self.kind {
            WarpKind::Constant => 0.0,
            WarpKind::Identity => 1.0,
            WarpKind::Sin => u.cos(),
            WarpKind::Cos => -u.sin(),
            WarpKind::Cosh => u.sinh(),
            WarpKind::Sinh => u.cosh(),
            WarpKind::Exp => u.exp(),
            WarpKind::Power(p) => p * u.powf(p - 1.0),
            WarpKind::Sampled(s) => s.deriv(u),
        }
    }

    fn base_d2(&self, u: f64) -> Option<f64> {
        Some(match &self.kind {
            WarpKind::Constant | WarpKind::Identity => 0.0,
            WarpKind::Sin => -u.sin(),
            WarpKind::Cos => -u.cos(),
            WarpKind::Cosh => u.cosh(),
            WarpKind::Sinh => u.sinh(),
            WarpKind::Exp => u.exp(),
            WarpKind::Power(p) => p * (p - 1.0) * u.powf(p - 2.0),
            WarpKind::Sampled(s) => return s.second(u),
        })
    }

    /// Sampled warps are tabulated in `t` directly; closed forms in `rate * t`.
    fn arg(&self, t: f64) -> f64 {
        match self.kind {
            WarpKind::Sampled(_) => t,
            _ => self.rate * t,
        }
    }

    fn chain(&self) -> f64 {
        match self.kind {
            WarpKind::Sampled(_) => 1.0,
            _ => self.rate,
        }
    }

    /// `f(t)` without a domain check.
    #[inline]
    pub fn f(&self, t: f64) -> f64 {
        self.amplitude * self.base(self.arg(t))
    }

    fn check(&self, t: f64) -> Result<()> {
        if self.interval.contains(t) {
            Ok(())
        } else {
            Err(Error::Domain { what: "t", value: t, lo: self.interval.a, hi: self.interval.b })
        }
    }

    /// `f(t)`, rejecting `t` outside the open interval.
    pub fn value(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.f(t))
    }

    pub fn derivative(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        Ok(self.df(t))
    }

    pub(crate) fn df(&self, t: f64) -> f64 {
        self.amplitude * self.chain() * self.base_d1(self.arg(t))
    }

    pub fn second_derivative(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        self.d2f(t)
    }

    fn d2f(&self, t: f64) -> Result<f64> {
        let c = self.chain();
        self.base_d2(self.arg(t))
            .map(|v| self.amplitude * c * c * v)
            .ok_or_else(|| Error::NoDerivative(format!("{} warp with linear interpolation", self.kind.name())))
    }

    fn critical_points(&self, s: f64, t: f64) -> Vec<f64> {
        let mut out = vec![];
        let r = self.rate;
        let mut periodic = |offset: f64| {
            // g'(u) = 0 at u = offset + k*pi.
            let (u0, u1) = ((r * s).min(r * t), (r * s).max(r * t));
            let mut k = ((u0 - offset) / PI).ceil();
            while offset + k * PI <= u1 {
                let tc = (offset + k * PI) / r;
                if tc > s && tc < t {
                    out.push(tc);
                }
                k += 1.0;
            }
        };
        match &self.kind {
            WarpKind::Sin => periodic(FRAC_PI_2),
            WarpKind::Cos => periodic(0.0),
            WarpKind::Cosh => {
                if s < 0.0 && t > 0.0 {
                    out.push(0.0);
                }
            }
            WarpKind::Sampled(sm) => sm.critical_points(s, t, &mut out),
            _ => {}
        }
        out
    }

    /// `(min, max)` of `f` on `[s, t]` (endpoints included; the order of `s`
    /// and `t` does not matter).
    pub fn extremes_on(&self, s: f64, t: f64) -> (f64, f64) {
        let (s, t) = (s.min(t), s.max(t));
        let (fs, ft) = (self.f(s), self.f(t));
        let (mut lo, mut hi) = (fs.min(ft), fs.max(ft));
        for c in self.critical_points(s, t) {
            let v = self.f(c);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    /// `m_{s,t} = min f` on `[s, t]`.
    pub fn min_on(&self, s: f64, t: f64) -> f64 {
        self.extremes_on(s, t).0
    }

    pub fn max_on(&self, s: f64, t: f64) -> f64 {
        self.extremes_on(s, t).1
    }

    /// `F_{s}(t) = \int_s^t 1/f`, finite endpoints inside the closure of `I`.
    pub fn null_reach(&self, s: f64, t: f64, tol: QuadTol) -> Result<f64> {
        if matches!(self.kind, WarpKind::Constant) {
            return Ok((t - s) / self.amplitude);
        }
        numeric::integrate(|x| 1.0 / self.f(x), s, t, tol)
    }

    /// Null transport from the base time `p0`.
    pub fn null_transport(&self, p0: f64) -> Result<NullTransport<'_>> {
        NullTransport::new(self, p0)
    }

    /// K-concavity test on the default window.
    pub fn concavity_check(&self, k: f64, grid_size: usize) -> Result<ConcavityReport> {
        self.concavity_check_on(k, grid_size, self.default_window())
    }

    /// Window used for grid tests: finite ends pulled inward, infinite ends truncated.
    pub fn default_window(&self) -> (f64, f64) {
        let Interval { a, b } = self.interval;
        match (a.is_finite(), b.is_finite()) {
            (true, true) => {
                let m = 1e-3 * (b - a);
                (a + m, b - m)
            }
            (true, false) => {
                let l = 10.0 * a.abs().max(1.0);
                (a + 1e-3 * l.min(1.0), a + l)
            }
            (false, true) => {
                let l = 10.0 * b.abs().max(1.0);
                (b - l, b - 1e-3 * l.min(1.0))
            }
            (false, false) => (-10.0, 10.0),
        }
    }

    /// Evaluates `f'' - K f` on a uniform grid over `window`.
    pub fn concavity_check_on(&self, k: f64, grid_size: usize, window: (f64, f64)) -> Result<ConcavityReport> {
        let (lo, hi) = window;
        if !(lo < hi) || !self.interval.contains(lo) || !self.interval.contains(hi) {
            return Err(Error::Precondition(format!("window [{lo}, {hi}] must lie inside the interval")));
        }
        let n = grid_size.max(2);
        let mut rep = ConcavityReport {
            k,
            window,
            holds_concave: true,
            holds_convex: true,
            worst_margin: 0.0,
            worst_t: lo,
        };
        for i in 0..n {
            let t = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let f = self.f(t);
            let band = CONCAVITY_BAND * f.abs().max(1.0);
            let g = self.d2f(t)? - k * f;
            if g > band {
                rep.holds_concave = false;
            }
            if g < -band {
                rep.holds_convex = false;
            }
            let scaled = g / f.abs().max(1.0);
            if scaled.abs() > rep.worst_margin.abs() || i == 0 {
                rep.worst_margin = scaled;
                rep.worst_t = t;
            }
        }
        Ok(rep)
    }

    /// Endpoint analysis for a timelike lower curvature bound `K`.
    pub fn singularity_report(&self, k: f64) -> Result<SingularityReport> {
        let concavity = self.concavity_check(k, 2001)?;
        let Interval { a, b } = self.interval;
        let mut verdicts = vec![];
        let consistent = concavity.holds_concave;
        if consistent {
            verdicts.push(format!("f is {k}-concave on the test window: lower bound {k} is consistent"));
        } else {
            verdicts.push(format!(
                "f is not {k}-concave: f'' - K f = {:.3e} at t = {:.6}; lower bound {k} is not implied",
                concavity.worst_margin, concavity.worst_t
            ));
        }
        if consistent && k < 0.0 {
            if self.interval.is_bounded() {
                verdicts.push(format!("K < 0 forces a finite interval: ({a}, {b}) is finite"));
            } else {
                verdicts.push(format!("inconsistent: K < 0 requires a finite interval, got ({a}, {b})"));
            }
        }
        if consistent && k == 0.0 && !self.is_constant() {
            if a.is_finite() || b.is_finite() {
                verdicts.push("K = 0 with non-constant f: an endpoint is finite, as required".into());
            } else {
                verdicts.push("inconsistent: K = 0 with non-constant f needs a finite endpoint".into());
            }
        }
        let diameter = b - a;
        if diameter.is_finite() {
            verdicts.push(format!("time separation is bounded by b - a = {diameter}"));
        }
        let bang = self.endpoint_collapse(Side::Left);
        let crunch = self.endpoint_collapse(Side::Right);
        for (name, side, e) in [("big bang", "a", &bang), ("big crunch", "b", &crunch)] {
            match e {
                Collapse::Yes => verdicts.push(format!("{name} at {side}: f -> 0 and |f'| -> inf")),
                Collapse::Inconclusive(why) => verdicts.push(format!("{name} test at {side} inconclusive: {why}")),
                Collapse::No => {}
            }
        }
        let big_bang = bang == Collapse::Yes;
        let big_crunch = crunch == Collapse::Yes;
        let upper_bound_possible = !(big_bang || big_crunch);
        if !upper_bound_possible {
            verdicts.push("no timelike upper curvature bound is possible".into());
        }
        Ok(SingularityReport {
            k,
            lower_bound_consistent: consistent,
            tau_diameter_bound: diameter,
            big_bang,
            big_crunch,
            upper_bound_possible,
            concavity,
            verdicts,
        })
    }

    fn endpoint_collapse(&self, side: Side) -> Collapse {
        let Interval { a, b } = self.interval;
        let e = match side {
            Side::Left => a,
            Side::Right => b,
        };
        if !e.is_finite() {
            return Collapse::No;
        }
        let w = (0.5 * (b - a)).min(1.0);
        let sign = match side {
            Side::Left => 1.0,
            Side::Right => -1.0,
        };
        if let WarpKind::Sampled(s) = &self.kind {
            let fe = self.f(e);
            let scale = s.fs.iter().cloned().fold(0.0, f64::max);
            return if fe <= 1e-6 * scale {
                Collapse::Inconclusive("tabulated values cannot resolve the endpoint limit".into())
            } else {
                Collapse::No
            };
        }
        // Outward derivative: f' for the left end, -f' for the right end.
        let probe = |k: i32| {
            let t = e + sign * w * 10f64.powi(-k);
            (self.f(t), sign * self.df(t))
        };
        let (f1, _) = probe(1);
        let (f9, d9) = probe(9);
        let (f10, d10) = probe(10);
        if !(f10 > 0.0 && f9 > 0.0 && f10 < f1) {
            return Collapse::No;
        }
        let alpha = (f9 / f10).log10();
        if alpha > 0.01 && alpha < 0.99 && d10 > d9 && d9 > 0.0 {
            Collapse::Yes
        } else {
            Collapse::No
        }
    }
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
enum Collapse {
    Yes,
    No,
    Inconclusive(String),
}

/// Tolerance band in `f'' - K f <= band * max(1, |f|)`.
pub const CONCAVITY_BAND: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ConcavityReport {
    pub k: f64,
    pub window: (f64, f64),
    pub holds_concave: bool,
    pub holds_convex: bool,
    /// `(f'' - K f) / max(1, |f|)` at the grid point of largest magnitude.
    pub worst_margin: f64,
    pub worst_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityReport {
    pub k: f64,
    pub lower_bound_consistent: bool,
    /// `b - a`, possibly infinite.
    pub tau_diameter_bound: f64,
    pub big_bang: bool,
    pub big_crunch: bool,
    pub upper_bound_possible: bool,
    pub concavity: ConcavityReport,
    pub verdicts: Vec<String>,
}

/// `F_{p0}(r) = \int_{p0}^r 1/f` with its inverse `h_{p0}` and the
/// horizons `a_{p0} <= 0 <= b_{p0}`.
#[derive(Debug, Clone)]
pub struct NullTransport<'w> {
    warp: &'w WarpSpec,
    p0: f64,
    forward: Table,
    backward: Table,
    tol: QuadTol,
}

#[derive(Debug, Clone)]
struct Table {
    /// `(r, F(r))`, monotone in `|r - p0|`, starting at `(p0, 0)`.
    nodes: Vec<(f64, f64)>,
    horizon: f64,
}

impl<'w> NullTransport<'w> {
    pub fn new(warp: &'w WarpSpec, p0: f64) -> Result<Self> {
        warp.check(p0)?;
        let tol = QuadTol::tight();
        let forward = Self::build(warp, p0, warp.interval.b, tol)?;
        let backward = Self::build(warp, p0, warp.interval.a, tol)?;
        Ok(NullTransport { warp, p0, forward, backward, tol })
    }

    fn build(warp: &WarpSpec, p0: f64, end: f64, tol: QuadTol) -> Result<Table> {
        let inv = |x: f64| 1.0 / warp.f(x);
        let horizon = match numeric::improper(inv, p0, end, tol)? {
            Improper::Converged(v) => v,
            Improper::Divergent if end > p0 => f64::INFINITY,
            Improper::Divergent => f64::NEG_INFINITY,
        };
        let q = 2f64.powf(-0.25);
        let width = if end.is_finite() { (end - p0).abs() } else { p0.abs().max(1.0) };
        let dir = if end > p0 { 1.0 } else { -1.0 };
        let mut nodes = vec![(p0, 0.0)];
        let mut acc = 0.0;
        for k in 1..=400 {
            let r = if end.is_finite() {
                end - (end - p0) * q.powi(k)
            } else {
                p0 + dir * width * (q.powi(-k) - 1.0)
            };
            let last = nodes.last().unwrap().0;
            // Near a finite endpoint 1/f loses relative accuracy; `solve` marches
            // past the table when needed.
            if r == last || (end.is_finite() && (end - r).abs() <= 1e-8 * end.abs().max(1.0)) || r.abs() > 1e15 {
                break;
            }
            let piece = numeric::integrate(inv, last, r, tol)?;
            acc += piece;
            nodes.push((r, acc));
            if piece.abs() <= 1e-17 * acc.abs() || acc.abs() > numeric::DIVERGENCE_CAP {
                break;
            }
        }
        Ok(Table { nodes, horizon })
    }

    pub fn base(&self) -> f64 {
        self.p0
    }

    /// Forward horizon `b_{p0} = \int_{p0}^b 1/f` (may be infinite).
    pub fn forward_horizon(&self) -> f64 {
        self.forward.horizon
    }

    /// Backward horizon `a_{p0} = \int_{p0}^a 1/f <= 0` (may be `-inf`).
    pub fn backward_horizon(&self) -> f64 {
        self.backward.horizon
    }

    /// `F_{p0}(r)` for `r` inside the interval.
    pub fn reach(&self, r: f64) -> Result<f64> {
        self.warp.check(r)?;
        let table = if r >= self.p0 { &self.forward } else { &self.backward };
        let i = table.nodes.partition_point(|&(x, _)| (x - self.p0).abs() <= (r - self.p0).abs());
        let (x, fx) = table.nodes[i.saturating_sub(1)];
        Ok(fx + numeric::integrate(|u| 1.0 / self.warp.f(u), x, r, self.tol)?)
    }

    /// `h_{p0}(s)`: the `r` with `F_{p0}(r) = s`, for `a_{p0} < s < b_{p0}`.
    pub fn solve(&self, s: f64) -> Result<f64> {
        let (lo, hi) = (self.backward.horizon, self.forward.horizon);
        if !(s > lo && s < hi) {
            return Err(Error::OutOfRange { value: s, lo, hi });
        }
        if s == 0.0 {
            return Ok(self.p0);
        }
        let table = if s > 0.0 { &self.forward } else { &self.backward };
        let sign = s.signum();
        let target = s.abs();
        let j = table.nodes.partition_point(|&(_, v)| v.abs() < target);
        let (mut r0, mut f0) = table.nodes[j - 1];
        let r1 = if j < table.nodes.len() {
            table.nodes[j].0
        } else {
            // Beyond the table: march outward until the target is passed.
            let end = if sign > 0.0 { self.warp.interval.b } else { self.warp.interval.a };
            let mut step = (r0 - self.p0).abs().max(1.0);
            loop {
                let mut next = r0 + sign * step;
                if end.is_finite() && (next - end) * sign >= 0.0 {
                    next = 0.5 * (r0 + end);
                }
                let v = f0 + numeric::integrate(|u| 1.0 / self.warp.f(u), r0, next, self.tol)?;
                if v.abs() >= target {
                    break next;
                }
                if !next.is_finite() || next.abs() > 1e300 || next == r0 {
                    return Err(Error::OutOfRange { value: s, lo, hi });
                }
                r0 = next;
                f0 = v;
                step *= 2.0;
            }
        };
        let inv = |u: f64| 1.0 / self.warp.f(u);
        let g = |r: f64| -> Result<f64> { Ok(sign * (f0 + numeric::integrate(inv, r0, r, self.tol)?) - target) };
        let dg = |r: f64| inv(r);
        let (lo_r, hi_r) = (r0.min(r1), r0.max(r1));
        if sign > 0.0 {
            numeric::newton_bracketed(g, dg, lo_r, hi_r, 1e-15)
        } else {
            numeric::newton_bracketed(|r| g(r).map(|v| -v), dg, lo_r, hi_r, 1e-15)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(kind: WarpKind, a: f64, b: f64) -> WarpSpec {
        WarpSpec::new(kind, Interval::new(a, b).unwrap()).unwrap()
    }

    #[test]
    fn sin_rejected_past_pi() {
        assert!(WarpSpec::new(WarpKind::Sin, Interval::new(0.0, 7.0).unwrap()).is_err());
        assert!(WarpSpec::new(WarpKind::Cos, Interval::new(-1.0, 1.0).unwrap()).is_ok());
        assert!(WarpSpec::new(WarpKind::Cos, Interval::new(-1.0, 2.0).unwrap()).is_err());
        assert!(WarpSpec::new(WarpKind::Identity, Interval::new(-1.0, 2.0).unwrap()).is_err());
    }

    #[test]
    fn domain_checks() {
        let f = w(WarpKind::Sin, 0.0, PI);
        assert!(f.value(0.0).is_err());
        assert!(f.value(1.0).is_ok());
    }

    #[test]
    fn minimum_on_subinterval() {
        let f = w(WarpKind::Cosh, f64::NEG_INFINITY, f64::INFINITY);
        assert_eq!(f.min_on(-1.0, 2.0), 1.0);
        assert_eq!(f.min_on(1.0, 2.0), 1f64.cosh());
        let s = w(WarpKind::Sin, 0.0, PI);
        assert!((s.max_on(0.5, 3.0) - 1.0).abs() < 1e-15);
        assert!((s.min_on(0.5, 3.0) - 3f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn exp_horizon_and_inverse() {
        let f = w(WarpKind::Exp, f64::NEG_INFINITY, f64::INFINITY);
        let nt = f.null_transport(0.0).unwrap();
        assert!((nt.forward_horizon() - 1.0).abs() < 1e-9);
        assert_eq!(nt.backward_horizon(), f64::NEG_INFINITY);
        let r = nt.solve(0.5).unwrap();
        assert!((r - 2f64.ln()).abs() < 1e-12);
        let r = nt.solve(-3.0).unwrap();
        assert!((r + 4f64.ln()).abs() < 1e-12, "{r}");
        assert!(nt.solve(1.0 + 1e-8).is_err());
    }

    #[test]
    fn identity_transport_is_exponential() {
        let f = w(WarpKind::Identity, 0.0, f64::INFINITY);
        let nt = f.null_transport(1.0).unwrap();
        assert_eq!(nt.forward_horizon(), f64::INFINITY);
        assert_eq!(nt.backward_horizon(), f64::NEG_INFINITY);
        for s in [-5.0, -0.3, 0.2, 1.0, 3.0, 40.0] {
            let r = nt.solve(s).unwrap();
            assert!((r / s.exp() - 1.0).abs() < 1e-11, "s = {s}: {r}");
        }
        assert!((nt.reach(2.0).unwrap() - 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn sin_horizons_diverge() {
        let f = w(WarpKind::Sin, 0.0, PI);
        let nt = f.null_transport(FRAC_PI_2).unwrap();
        assert_eq!(nt.forward_horizon(), f64::INFINITY);
        assert_eq!(nt.backward_horizon(), f64::NEG_INFINITY);
        // F(r) = ln tan(r/2) from pi/2.
        let r = nt.solve(2.0).unwrap();
        assert!(((r / 2.0).tan().ln() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn power_two_thirds_finite_past_horizon() {
        let f = w(WarpKind::Power(2.0 / 3.0), 0.0, f64::INFINITY);
        let nt = f.null_transport(1.0).unwrap();
        assert!((nt.backward_horizon() + 3.0).abs() < 1e-8, "{}", nt.backward_horizon());
        assert_eq!(nt.forward_horizon(), f64::INFINITY);
    }

    #[test]
    fn concavity_examples() {
        let s = w(WarpKind::Sin, 0.0, PI);
        let r = s.concavity_check(-1.0, 500).unwrap();
        assert!(r.holds_concave && r.holds_convex);
        assert_eq!(r.worst_margin, 0.0);
        let e = w(WarpKind::Exp, f64::NEG_INFINITY, f64::INFINITY);
        let r = e.concavity_check(0.0, 500).unwrap();
        assert!(!r.holds_concave);
    }

    #[test]
    fn linear_samples_have_no_second_derivative() {
        let s = Sampled::new(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 1.5], Interpolation::Linear).unwrap();
        let f = WarpSpec::new(WarpKind::Sampled(s), Interval::new(0.0, 2.0).unwrap()).unwrap();
        assert!(matches!(f.second_derivative(0.5), Err(Error::NoDerivative(_))));
        assert_eq!(f.min_on(0.2, 1.8), f.f(0.2));
        assert_eq!(f.max_on(0.2, 1.8), 2.0);
    }

    #[test]
    fn spline_reproduces_smooth_data() {
        let ts: Vec<f64> = (0..=40).map(|i| i as f64 * 0.05).collect();
        let fs: Vec<f64> = ts.iter().map(|t| t.cosh()).collect();
        let s = Sampled::new(ts, fs, Interpolation::Spline).unwrap();
        let f = WarpSpec::new(WarpKind::Sampled(s), Interval::new(0.0, 2.0).unwrap()).unwrap();
        for t in [0.3, 1.01, 1.77] {
            assert!((f.f(t) - t.cosh()).abs() < 1e-4);
            assert!((f.second_derivative(t).unwrap() - t.cosh()).abs() < 5e-2);
        }
    }

    #[test]
    fn big_bang_detection() {
        let f = w(WarpKind::Power(2.0 / 3.0), 0.0, f64::INFINITY);
        let r = f.singularity_report(0.0).unwrap();
        assert!(r.big_bang && !r.upper_bound_possible);
        let s = w(WarpKind::Sin, 0.0, PI);
        let r = s.singularity_report(-1.0).unwrap();
        assert!(!r.big_bang && !r.big_crunch && r.lower_bound_consistent);
        assert!((r.tau_diameter_bound - PI).abs() < 1e-15);
    }
}
