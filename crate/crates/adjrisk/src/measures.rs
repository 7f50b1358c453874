//! Base monetary risk measures: exact evaluation on discrete laws and the
//! order-statistic estimators on sample windows.
//!
//! Exact values integrate the quantile step function piecewise, so VaR, ES
//! and RVaR are computed without discretization error. The window estimators
//! generalize the hard-coded 60-day window to any length `n` by substituting
//! `n` throughout; `n = 60` reproduces the original formulas.

use crate::distributions::{empirical_law, DiscreteDistribution, SampleWindow};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;

/// A probability level in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Level(f64);

impl Level {
    pub const ZERO: Level = Level(0.0);
    pub const HALF: Level = Level(0.5);
    pub const ONE: Level = Level(1.0);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("level {p} not in [0, 1]")));
        }
        Ok(Level(p))
    }

    /// Constructor for values already known to lie in `[0, 1]`.
    pub(crate) fn from_trusted(p: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&p), "level {p} out of range");
        Level(p)
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Value-at-Risk: the left-continuous quantile at level `p`.
pub fn var(d: &DiscreteDistribution, p: Level) -> ExtReal {
    ExtReal::finite(d.quantile_value(p.get()))
}

/// Expected Shortfall at level `p`: the normalized tail integral of VaR,
/// the essential supremum at `p = 1`.
pub fn es(d: &DiscreteDistribution, p: Level) -> ExtReal {
    ExtReal::finite(es_value(d, p.get()))
}

pub(crate) fn es_value(d: &DiscreteDistribution, p: f64) -> f64 {
    if p >= 1.0 {
        return d.max_value();
    }
    d.quantile_integral(p, 1.0) / (1.0 - p)
}

/// Range-Value-at-Risk over `[a1, a2]`; degenerates to VaR when `a1 = a2`.
pub fn rvar(d: &DiscreteDistribution, a1: Level, a2: Level) -> Result<ExtReal> {
    if a1.get() > a2.get() {
        return Err(Error::Precondition(format!(
            "rvar levels out of order: {} > {}",
            a1.get(),
            a2.get()
        )));
    }
    if a1.get() == a2.get() {
        return Ok(var(d, a1));
    }
    Ok(ExtReal::finite(
        d.quantile_integral(a1.get(), a2.get()) / (a2.get() - a1.get()),
    ))
}

/// Absolute bisection tolerance for the expectile solver.
pub const EXPECTILE_TOL: f64 = 1e-12;
const EXPECTILE_MAX_ITER: usize = 200;

/// Residual of the expectile defining equation at `e`:
/// `q E[(X - e)+] - (1 - q) E[(e - X)+]`. Continuous and strictly decreasing.
pub fn expectile_residual(d: &DiscreteDistribution, q: f64, e: f64) -> f64 {
    let mut gain = 0.0;
    let mut shortfall = 0.0;
    for (v, p) in d.atoms() {
        if v > e {
            gain += p * (v - e);
        } else {
            shortfall += p * (e - v);
        }
    }
    q * gain - (1.0 - q) * shortfall
}

/// Expectile at level `q`: the root of the defining equation, solved by
/// bisection on `[min atom, max atom]`; the extremes at `q = 0` and `q = 1`.
pub fn expectile(d: &DiscreteDistribution, q: Level) -> ExtReal {
    let q = q.get();
    if q == 0.0 {
        return ExtReal::finite(d.min_value());
    }
    if q == 1.0 {
        return ExtReal::finite(d.max_value());
    }
    let mut lo = d.min_value();
    let mut hi = d.max_value();
    if lo == hi {
        return ExtReal::finite(lo);
    }
    let tol = EXPECTILE_TOL * lo.abs().max(hi.abs()).max(1.0);
    for _ in 0..EXPECTILE_MAX_ITER {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f = expectile_residual(d, q, mid);
        if f == 0.0 {
            return ExtReal::finite(mid);
        }
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    ExtReal::finite(0.5 * (lo + hi))
}

const SIMPSON_TOL: f64 = 1e-10;
const SIMPSON_MAX_DEPTH: usize = 40;

fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
}

fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    whole: f64,
    m: f64,
    fm: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let (left, lm, flm) = simpson(f, a, fa, m, fm);
    let (right, rm, frm) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth >= SIMPSON_MAX_DEPTH || delta.abs() <= 15.0 * tol {
        // Richardson extrapolation of the composite rule.
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth + 1)
        + adaptive_simpson(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth + 1)
}

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(&f, a, fa, b, fb);
    adaptive_simpson(&f, a, fa, b, fb, whole, m, fm, tol, 0)
}

/// Conditional ES at level `p`: the normalized tail integral of ES over the
/// level, the essential supremum at `p = 1`.
///
/// ES is smooth between the cumulative-probability breakpoints of `d`, so the
/// integral is evaluated segment by segment with adaptive refinement.
pub fn conditional_es(d: &DiscreteDistribution, p: Level) -> ExtReal {
    let p = p.get();
    if p >= 1.0 {
        return ExtReal::finite(d.max_value());
    }
    let mut total = 0.0;
    let mut lower = p;
    for &c in d.cum() {
        if c <= lower {
            continue;
        }
        let upper = c.min(1.0);
        total += integrate(|q| es_value(d, q), lower, upper, SIMPSON_TOL);
        lower = upper;
        if lower >= 1.0 {
            break;
        }
    }
    ExtReal::finite(total / (1.0 - p))
}

fn check_open_level(p: Level, what: &str) -> Result<f64> {
    let p = p.get();
    if p <= 0.0 || p >= 1.0 {
        return Err(Error::Precondition(format!("{what} requires a level in (0, 1), got {p}")));
    }
    Ok(p)
}

/// Window VaR estimator: the order statistic at index `floor(n p) + 1`.
pub fn var_hat(w: &SampleWindow, p: Level) -> Result<f64> {
    let p = check_open_level(p, "var_hat")?;
    let n = w.len();
    let idx = ((n as f64 * p).floor() as usize + 1).min(n);
    Ok(w.order_statistic(idx))
}

/// Window ES estimator: the weighted tail sum
/// `(1/(n - np)) (sum_{i=floor(np)+2}^{n} x_(i) + x_(floor(np)+1) (floor(np)+1 - np))`.
pub fn es_hat(w: &SampleWindow, p: Level) -> Result<f64> {
    let p = check_open_level(p, "es_hat")?;
    let n = w.len();
    let np = n as f64 * p;
    let j = (np.floor() as usize).min(n - 1);
    let mut tail: f64 = w.sorted()[(j + 1).min(n)..].iter().sum();
    tail += w.order_statistic(j + 1) * ((j + 1) as f64 - np);
    Ok(tail / (n as f64 - np))
}

/// Default number of grid levels for the RVaR estimator.
pub const RVAR_GRID_POINTS: usize = 20;

/// Window RVaR estimator: the average of `var_hat` over `grid_points`
/// equidistant levels spanning `[a1, a2]`.
pub fn rvar_hat(w: &SampleWindow, a1: Level, a2: Level, grid_points: usize) -> Result<f64> {
    let lo = check_open_level(a1, "rvar_hat")?;
    let hi = check_open_level(a2, "rvar_hat")?;
    if lo >= hi {
        return Err(Error::Precondition(format!(
            "rvar_hat levels out of order: {lo} >= {hi}"
        )));
    }
    if grid_points == 0 {
        return Err(Error::Precondition("rvar_hat needs at least one grid point".into()));
    }
    if grid_points == 1 {
        return var_hat(w, a1);
    }
    let k = grid_points as f64;
    let mut sum = 0.0;
    for i in 0..grid_points {
        let u = lo + (i as f64) / (k - 1.0) * (hi - lo);
        sum += var_hat(w, Level::from_trusted(u.clamp(lo, hi)))?;
    }
    Ok(sum / k)
}

/// Window expectile estimator: the exact expectile of the empirical law.
pub fn expectile_hat(w: &SampleWindow, q: Level) -> Result<f64> {
    check_open_level(q, "expectile_hat")?;
    Ok(expectile(&empirical_law(w), q).as_f64().expect("finite on finite support"))
}
