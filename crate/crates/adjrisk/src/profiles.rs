//! Target risk profiles: increasing functions `g : [0,1] -> [0, inf]` stored
//! as left-continuous piecewise-constant data.
//!
//! Two kinds are supported. A step profile has interior jump levels
//! `0 < p_1 < ... < p_n < 1` with strictly increasing finite values
//! `r_1 < ... < r_n`; it takes `r_1` on `[0, p_1]`, `r_i` on `(p_{i-1}, p_i]`
//! and `+inf` above `p_n`. A tabulated profile has grid levels in `(0, 1]`
//! with nondecreasing values; it is 0 at the origin, takes the grid value on
//! each `(t_{j-1}, t_j]` and `+inf` above the last grid level. Left-continuous
//! increasing storage makes every stored profile lower semicontinuous.

use std::fmt::Write as _;

use crate::distributions::{DiscreteDistribution, SampleWindow};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::families::{rho_p, rho_p_hat, RiskFamilySpec};
use crate::measures::Level;

#[derive(Debug, Clone, PartialEq)]
enum ProfileKind {
    Step { levels: Vec<f64>, values: Vec<f64> },
    Tabulated { grid: Vec<(f64, ExtReal)> },
}

/// A target risk profile `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetRiskProfile {
    kind: ProfileKind,
}

/// Result of checking the finiteness assumption `0 < p1 < p2 < 1` where
/// `p1 = max{p : g(p) = 0}` and `p2 = max{p : g(p) < inf}`.
#[derive(Debug, Clone, PartialEq)]
pub enum FinitenessCheck {
    Satisfied { p1: Level, p2: Level },
    Violated { clause: FinitenessViolation, p1: f64, p2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinitenessViolation {
    /// `p1 = 0`: the profile leaves zero immediately.
    P1AtZero,
    /// `p1 >= p2`: no level range with finite positive values.
    P1NotBelowP2,
    /// `p2 = 1`: the profile stays finite up to level 1.
    P2AtOne,
}

impl std::fmt::Display for FinitenessViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FinitenessViolation::P1AtZero => write!(f, "p1 = 0 (need 0 < p1)"),
            FinitenessViolation::P1NotBelowP2 => write!(f, "p1 >= p2 (need p1 < p2)"),
            FinitenessViolation::P2AtOne => write!(f, "p2 = 1 (need p2 < 1)"),
        }
    }
}

impl TargetRiskProfile {
    /// Builds a step profile from interior jump levels and their values.
    pub fn step_profile(levels: &[f64], values: &[f64]) -> Result<Self> {
        if levels.is_empty() || levels.len() != values.len() {
            return Err(Error::InvalidProfile(
                "step profile needs matching, non-empty level and value lists".into(),
            ));
        }
        for (i, &p) in levels.iter().enumerate() {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidProfile(format!("step level {p} not in (0, 1)")));
            }
            if i > 0 && p <= levels[i - 1] {
                return Err(Error::InvalidProfile("step levels must be strictly increasing".into()));
            }
        }
        for (i, &r) in values.iter().enumerate() {
            if !r.is_finite() {
                return Err(Error::InvalidProfile(format!("step value {r} must be finite")));
            }
            if i == 0 && r < 0.0 {
                return Err(Error::InvalidProfile("first step value must be >= 0".into()));
            }
            if i > 0 && r <= values[i - 1] {
                return Err(Error::InvalidProfile("step values must be strictly increasing".into()));
            }
        }
        Ok(Self { kind: ProfileKind::Step { levels: levels.to_vec(), values: values.to_vec() } })
    }

    /// Builds a tabulated profile from `(level, value)` rows.
    pub fn tabulated(grid: &[(f64, ExtReal)]) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidProfile("tabulated profile needs at least one row".into()));
        }
        for (i, &(t, v)) in grid.iter().enumerate() {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::InvalidProfile(format!("tabulated level {t} not in (0, 1]")));
            }
            if i > 0 && t <= grid[i - 1].0 {
                return Err(Error::InvalidProfile(
                    "tabulated levels must be strictly increasing".into(),
                ));
            }
            match v {
                ExtReal::NegInf => {
                    return Err(Error::InvalidProfile("profile values cannot be -inf".into()))
                }
                ExtReal::Finite(x) if x < 0.0 => {
                    return Err(Error::InvalidProfile(format!("profile value {x} must be >= 0")))
                }
                _ => {}
            }
            if i > 0 && v < grid[i - 1].1 {
                return Err(Error::InvalidProfile("tabulated values must be nondecreasing".into()));
            }
        }
        if !grid[0].1.is_finite() {
            return Err(Error::InvalidProfile(
                "first tabulated value must be finite (g must be finite somewhere on (0, 1])".into(),
            ));
        }
        Ok(Self { kind: ProfileKind::Tabulated { grid: grid.to_vec() } })
    }

    /// Evaluates `g(p)` under the stored left-continuous step semantics.
    pub fn eval(&self, p: Level) -> ExtReal {
        let p = p.get();
        match &self.kind {
            ProfileKind::Step { levels, values } => {
                if p <= levels[0] {
                    return ExtReal::finite(values[0]);
                }
                for (i, &l) in levels.iter().enumerate() {
                    if p <= l {
                        return ExtReal::finite(values[i]);
                    }
                }
                ExtReal::PosInf
            }
            ProfileKind::Tabulated { grid } => {
                if p == 0.0 {
                    return ExtReal::Finite(0.0);
                }
                for &(t, v) in grid {
                    if p <= t {
                        return v;
                    }
                }
                ExtReal::PosInf
            }
        }
    }

    /// Right-continuous generalized inverse `g_+^{-1}(u) = sup{p : g(p) <= u}`.
    ///
    /// Errors when `u < g(0)`.
    pub fn left_inverse(&self, u: ExtReal) -> Result<Level> {
        if u < self.eval(Level::ZERO) {
            return Err(Error::Domain(format!(
                "left_inverse: u = {u} below g(0) = {}",
                self.eval(Level::ZERO)
            )));
        }
        if u == ExtReal::PosInf {
            return Ok(Level::ONE);
        }
        match &self.kind {
            ProfileKind::Step { levels, values } => {
                let mut best = 0.0;
                for (i, &r) in values.iter().enumerate() {
                    if ExtReal::finite(r) <= u {
                        best = levels[i];
                    }
                }
                Ok(Level::from_trusted(best))
            }
            ProfileKind::Tabulated { grid } => {
                let mut best = 0.0;
                for &(t, v) in grid {
                    if v <= u {
                        best = t;
                    }
                }
                Ok(Level::from_trusted(best))
            }
        }
    }

    /// The step representation `(levels, values)`, if this is a step profile.
    pub fn as_step(&self) -> Option<(&[f64], &[f64])> {
        match &self.kind {
            ProfileKind::Step { levels, values } => Some((levels, values)),
            ProfileKind::Tabulated { .. } => None,
        }
    }

    /// The stored jump levels, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            ProfileKind::Step { levels, .. } => levels.clone(),
            ProfileKind::Tabulated { grid } => grid.iter().map(|&(t, _)| t).collect(),
        }
    }

    /// The distinct values `g` attains, ascending (including `+inf` when the
    /// profile reaches it).
    pub fn image(&self) -> Vec<ExtReal> {
        let mut img: Vec<ExtReal> = Vec::new();
        match &self.kind {
            ProfileKind::Step { values, .. } => {
                img.extend(values.iter().map(|&r| ExtReal::finite(r)));
                img.push(ExtReal::PosInf);
            }
            ProfileKind::Tabulated { grid } => {
                img.push(ExtReal::Finite(0.0));
                img.extend(grid.iter().map(|&(_, v)| v));
                if grid.last().unwrap().0 < 1.0 {
                    img.push(ExtReal::PosInf);
                }
            }
        }
        img.dedup();
        img
    }

    /// Whether `g(0) = 0`.
    pub fn in_g0(&self) -> bool {
        self.eval(Level::ZERO) == ExtReal::Finite(0.0)
    }

    /// `max{p : g(p) = 0}`, or `None` when `g` is nowhere zero.
    pub fn p1(&self) -> Option<Level> {
        let zero = ExtReal::Finite(0.0);
        match &self.kind {
            ProfileKind::Step { levels, values } => {
                if values[0] == 0.0 {
                    Some(Level::from_trusted(levels[0]))
                } else {
                    None
                }
            }
            ProfileKind::Tabulated { grid } => {
                let mut best = 0.0;
                for &(t, v) in grid {
                    if v == zero {
                        best = t;
                    }
                }
                Some(Level::from_trusted(best))
            }
        }
    }

    /// `max{p : g(p) < inf}`.
    pub fn p2(&self) -> Level {
        match &self.kind {
            ProfileKind::Step { levels, .. } => Level::from_trusted(*levels.last().unwrap()),
            ProfileKind::Tabulated { grid } => {
                let mut best = 0.0;
                for &(t, v) in grid {
                    if v.is_finite() {
                        best = t;
                    }
                }
                Level::from_trusted(best)
            }
        }
    }

    /// Checks the finiteness assumption `0 < p1 < p2 < 1`.
    ///
    /// Requires `g` in `G_0`. Lower semicontinuity holds structurally for the
    /// stored left-continuous increasing forms, so only the level clauses can
    /// fail; violations are reported as data, not errors.
    pub fn validate_finiteness_assumption(&self) -> Result<FinitenessCheck> {
        if !self.in_g0() {
            return Err(Error::Precondition(
                "finiteness assumption applies to profiles with g(0) = 0".into(),
            ));
        }
        let p1 = self.p1().expect("g(0) = 0 implies the zero set is nonempty").get();
        let p2 = self.p2().get();
        let clause = if p1 <= 0.0 {
            Some(FinitenessViolation::P1AtZero)
        } else if p1 >= p2 {
            Some(FinitenessViolation::P1NotBelowP2)
        } else if p2 >= 1.0 {
            Some(FinitenessViolation::P2AtOne)
        } else {
            None
        };
        Ok(match clause {
            None => FinitenessCheck::Satisfied {
                p1: Level::from_trusted(p1),
                p2: Level::from_trusted(p2),
            },
            Some(clause) => FinitenessCheck::Violated { clause, p1, p2 },
        })
    }

    /// Serializes as a `level<TAB>value` table with a kind header; values use
    /// the shortest representation that parses back exactly.
    pub fn to_table_string(&self) -> String {
        let mut out = String::new();
        match &self.kind {
            ProfileKind::Step { levels, values } => {
                out.push_str("# adjrisk profile: step\n");
                for (l, v) in levels.iter().zip(values) {
                    let _ = writeln!(out, "{l}\t{v}");
                }
            }
            ProfileKind::Tabulated { grid } => {
                out.push_str("# adjrisk profile: tabulated\n");
                for (t, v) in grid {
                    let _ = writeln!(out, "{t}\t{v}");
                }
            }
        }
        out
    }

    /// Parses the table format produced by [`Self::to_table_string`].
    ///
    /// Without a kind header the rows are read as a tabulated profile.
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut kind: Option<&str> = None;
        let mut rows: Vec<(f64, ExtReal)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(k) = rest.trim().strip_prefix("adjrisk profile:") {
                    kind = Some(match k.trim() {
                        "step" => "step",
                        "tabulated" => "tabulated",
                        other => {
                            return Err(Error::Parse {
                                line: idx + 1,
                                message: format!("unknown profile kind {other:?}"),
                            })
                        }
                    });
                }
                continue;
            }
            let mut parts = line.split_whitespace();
            let (lvl, val) = match (parts.next(), parts.next(), parts.next()) {
                (Some(l), Some(v), None) => (l, v),
                _ => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("expected `level<TAB>value`, got {line:?}"),
                    })
                }
            };
            let level: f64 = lvl.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("bad level {lvl:?}"),
            })?;
            let value: ExtReal = val.parse().map_err(|_| Error::Parse {
                line: idx + 1,
                message: format!("bad value {val:?}"),
            })?;
            rows.push((level, value));
        }
        if rows.is_empty() {
            return Err(Error::InvalidProfile("profile table has no rows".into()));
        }
        match kind {
            Some("step") => {
                let levels: Vec<f64> = rows.iter().map(|&(l, _)| l).collect();
                let values: Vec<f64> = rows
                    .iter()
                    .map(|&(_, v)| {
                        v.as_f64().ok_or_else(|| {
                            Error::InvalidProfile("step profile values must be finite".into())
                        })
                    })
                    .collect::<Result<_>>()?;
                Self::step_profile(&levels, &values)
            }
            _ => Self::tabulated(&rows),
        }
    }
}

/// What a benchmark profile is calibrated against.
#[derive(Debug, Clone, Copy)]
pub enum BenchmarkSource<'a> {
    Distribution(&'a DiscreteDistribution),
    Window(&'a SampleWindow),
}

/// The case-study grid: steps of 0.02 restricted to `[0.0001, 0.9999]`.
pub fn default_benchmark_grid() -> Vec<Level> {
    let mut grid = vec![Level::from_trusted(1e-4)];
    for k in 1..50 {
        grid.push(Level::from_trusted(k as f64 * 0.02));
    }
    grid.push(Level::from_trusted(0.9999));
    grid
}

/// Calibrates a benchmark profile: the family evaluated on the benchmark at
/// each grid level, clamped at zero and rectified to be nondecreasing by a
/// running maximum. Above the last grid level the profile is `+inf`.
pub fn benchmark_profile(
    spec: &RiskFamilySpec,
    benchmark: BenchmarkSource<'_>,
    grid: &[Level],
) -> Result<TargetRiskProfile> {
    if grid.is_empty() {
        return Err(Error::Precondition("benchmark grid is empty".into()));
    }
    for (i, l) in grid.iter().enumerate() {
        if l.get() <= 0.0 {
            return Err(Error::Precondition("benchmark grid levels must be positive".into()));
        }
        if i > 0 && l.get() <= grid[i - 1].get() {
            return Err(Error::Precondition("benchmark grid must be strictly increasing".into()));
        }
    }
    let mut rows: Vec<(f64, ExtReal)> = Vec::with_capacity(grid.len());
    let mut running = 0.0f64;
    for &p in grid {
        let raw = match benchmark {
            BenchmarkSource::Distribution(d) => rho_p(spec, d, p),
            BenchmarkSource::Window(w) => ExtReal::finite(rho_p_hat(spec, w, p)?),
        };
        let clamped = match raw.as_f64() {
            Some(x) => x.max(0.0),
            None => {
                return Err(Error::InvalidProfile(format!(
                    "benchmark family value at level {} is not finite",
                    p.get()
                )))
            }
        };
        running = running.max(clamped);
        rows.push((p.get(), ExtReal::finite(running)));
    }
    TargetRiskProfile::tabulated(&rows)
}
