//! The adjusted risk measure: the supremum over levels of the family value
//! minus the target risk profile, together with the level attaining it.
//!
//! The supremum is taken over a finite candidate grid built from uniform
//! steps, the profile's jump levels, left-limit approximations just below
//! those jumps, and the family's segment endpoints. For left-continuous step
//! data and ordered families this captures every candidate maximizer, which
//! the closed-form and ordered-representation cross-checks assert.

use crate::distributions::{DiscreteDistribution, SampleWindow};
use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::families::{check_ordered, rho_p, rho_p_hat, RiskFamilySpec};
use crate::measures::Level;
use crate::profiles::TargetRiskProfile;

/// Offset used to approximate left limits just below profile jumps.
pub const DEFAULT_LEFT_LIMIT_OFFSET: f64 = 1e-9;

/// Uniform grid step used by the case-study configuration.
pub const DEFAULT_GRID_STEP: f64 = 0.02;

/// Level bounds for window-estimator evaluation.
pub const HAT_LEVEL_LO: f64 = 1e-4;
pub const HAT_LEVEL_HI: f64 = 0.9999;

/// Value of an adjusted risk measure with the attaining grid level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjustedResult {
    pub value: ExtReal,
    /// Smallest grid level attaining the maximum.
    pub argmax_level: Level,
    /// False only when every grid term is `-inf`.
    pub attained: bool,
}

/// Uniform levels over `[0, 1]` inclusive.
pub fn uniform_grid(step: f64) -> Vec<Level> {
    let mut grid = vec![Level::ZERO];
    let mut k = 1usize;
    loop {
        let p = k as f64 * step;
        if p >= 1.0 {
            break;
        }
        grid.push(Level::from_trusted(p));
        k += 1;
    }
    grid.push(Level::ONE);
    grid
}

/// Uniform levels `k * step` restricted to `[lo, hi]`, with both bounds included.
pub fn uniform_grid_bounded(step: f64, lo: f64, hi: f64) -> Vec<Level> {
    let mut grid = vec![Level::from_trusted(lo)];
    let mut k = 1usize;
    loop {
        let p = k as f64 * step;
        if p >= hi {
            break;
        }
        if p > lo {
            grid.push(Level::from_trusted(p));
        }
        k += 1;
    }
    grid.push(Level::from_trusted(hi));
    grid
}

/// Evaluation levels: the caller's grid, the profile breakpoints with their
/// left-limit approximations, and the family segment endpoints, clamped to
/// `bounds` and deduplicated.
pub fn candidate_levels(
    spec: &RiskFamilySpec,
    g: &TargetRiskProfile,
    grid: &[Level],
    left_limit_offset: f64,
    bounds: (f64, f64),
) -> Vec<f64> {
    let (lo, hi) = bounds;
    let mut levels: Vec<f64> = grid.iter().map(|l| l.get()).collect();
    for bp in g.breakpoints() {
        levels.push(bp);
        levels.push(bp - left_limit_offset);
    }
    levels.extend(spec.segment_endpoints());
    let mut levels: Vec<f64> = levels.into_iter().map(|p| p.clamp(lo, hi)).collect();
    levels.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup();
    levels
}

fn grid_max(terms: impl Iterator<Item = (f64, ExtReal)>) -> AdjustedResult {
    let mut best: Option<(f64, ExtReal)> = None;
    for (p, v) in terms {
        match best {
            None => best = Some((p, v)),
            // Strict improvement only, so ties resolve to the smallest level.
            Some((_, b)) if v > b => best = Some((p, v)),
            _ => {}
        }
    }
    let (p, value) = best.expect("candidate grid is never empty");
    AdjustedResult {
        value,
        argmax_level: Level::from_trusted(p),
        attained: value > ExtReal::NegInf,
    }
}

/// Grid supremum of `rho_p(X) - g(p)` on an exact law.
pub fn adjusted_value(
    spec: &RiskFamilySpec,
    g: &TargetRiskProfile,
    d: &DiscreteDistribution,
    grid: &[Level],
) -> AdjustedResult {
    let levels = candidate_levels(spec, g, grid, DEFAULT_LEFT_LIMIT_OFFSET, (0.0, 1.0));
    grid_max(levels.into_iter().map(|p| {
        let lvl = Level::from_trusted(p);
        (p, rho_p(spec, d, lvl).sub(g.eval(lvl)))
    }))
}

/// Grid supremum of the window estimator minus the profile, restricted to
/// levels in `[`[`HAT_LEVEL_LO`]`, `[`HAT_LEVEL_HI`]`]`.
pub fn adjusted_value_hat(
    spec: &RiskFamilySpec,
    g: &TargetRiskProfile,
    w: &SampleWindow,
    grid: &[Level],
) -> Result<AdjustedResult> {
    for l in grid {
        if l.get() < HAT_LEVEL_LO || l.get() > HAT_LEVEL_HI {
            return Err(Error::Precondition(format!(
                "estimator grid level {} outside [{HAT_LEVEL_LO}, {HAT_LEVEL_HI}]",
                l.get()
            )));
        }
    }
    let levels =
        candidate_levels(spec, g, grid, DEFAULT_LEFT_LIMIT_OFFSET, (HAT_LEVEL_LO, HAT_LEVEL_HI));
    let mut terms = Vec::with_capacity(levels.len());
    for p in levels {
        let lvl = Level::from_trusted(p);
        let value = ExtReal::finite(rho_p_hat(spec, w, lvl)?).sub(g.eval(lvl));
        terms.push((p, value));
    }
    Ok(grid_max(terms.into_iter()))
}

fn step_levels_match(family_levels: &[Level], step_levels: &[f64]) -> bool {
    family_levels.len() == step_levels.len()
        && family_levels
            .iter()
            .zip(step_levels)
            .all(|(a, &b)| (a.get() - b).abs() <= 1e-12)
}

/// Finite-maximum reduction for a step profile: the family evaluated at the
/// step levels (and at 0) minus the step values.
///
/// Applies to the ES, SCRM, CRM, FCRM and expectile families; for CRM and
/// FCRM the family levels must match the profile's jump levels.
pub fn closed_form_step(
    spec: &RiskFamilySpec,
    g: &TargetRiskProfile,
    d: &DiscreteDistribution,
) -> Result<AdjustedResult> {
    let (levels, _values) = g.as_step().ok_or_else(|| {
        Error::Precondition("closed_form_step needs a step profile".into())
    })?;
    match spec {
        RiskFamilySpec::Es | RiskFamilySpec::Scrm { .. } | RiskFamilySpec::Expectile => {}
        RiskFamilySpec::Crm { levels: fam } | RiskFamilySpec::Fcrm { levels: fam } => {
            if !step_levels_match(fam, levels) {
                return Err(Error::LevelMismatch(format!(
                    "family levels {:?} do not match step levels {:?}",
                    fam.iter().map(|l| l.get()).collect::<Vec<_>>(),
                    levels
                )));
            }
        }
        other => {
            return Err(Error::Precondition(format!(
                "closed_form_step does not cover the {} family",
                other.name()
            )))
        }
    }
    let mut candidates = vec![0.0];
    candidates.extend_from_slice(levels);
    Ok(grid_max(candidates.into_iter().map(|p| {
        let lvl = Level::from_trusted(p);
        (p, rho_p(spec, d, lvl).sub(g.eval(lvl)))
    })))
}

/// The ordered-family representation: the maximum over the profile's image
/// values `u` of `rho_{g_+^{-1}(u)}(X) - u`.
///
/// Errors when the family fails the orderedness check on the evaluation grid.
pub fn ordered_representation(
    spec: &RiskFamilySpec,
    g: &TargetRiskProfile,
    d: &DiscreteDistribution,
) -> Result<ExtReal> {
    let levels = candidate_levels(spec, g, &uniform_grid(DEFAULT_GRID_STEP), 0.0, (0.0, 1.0));
    let grid: Vec<Level> = levels.into_iter().map(Level::from_trusted).collect();
    let check = check_ordered(spec, d, &grid);
    if let Some(v) = check.violation {
        return Err(Error::NotOrdered {
            p: v.p.get(),
            q: v.q.get(),
            rho_p: v.rho_p.to_string(),
            rho_q: v.rho_q.to_string(),
        });
    }
    let mut best = ExtReal::NegInf;
    for u in g.image() {
        let level = g.left_inverse(u)?;
        let term = rho_p(spec, d, level).sub(u);
        if term > best {
            best = term;
        }
    }
    Ok(best)
}

/// An increasing, right-continuous map `u -> alpha(u)` from `[0, inf)` to
/// `(0, 1]`, stored as step breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaFunction {
    initial: f64,
    /// `(u_k, a_k)`: from capital `u_k` onwards the level is `a_k`.
    steps: Vec<(f64, f64)>,
}

impl AlphaFunction {
    pub fn new(initial: f64, steps: &[(f64, f64)]) -> Result<Self> {
        if !(initial > 0.0 && initial <= 1.0) {
            return Err(Error::InvalidArgument(format!("alpha(0) = {initial} not in (0, 1]")));
        }
        let mut prev_u = 0.0;
        let mut prev_a = initial;
        for &(u, a) in steps {
            if !(u > prev_u) {
                return Err(Error::InvalidArgument(
                    "alpha breakpoints must be strictly increasing and positive".into(),
                ));
            }
            if !(a > prev_a && a <= 1.0) {
                return Err(Error::InvalidArgument(
                    "alpha values must be strictly increasing within (0, 1]".into(),
                ));
            }
            prev_u = u;
            prev_a = a;
        }
        Ok(Self { initial, steps: steps.to_vec() })
    }

    pub fn constant(alpha: f64) -> Result<Self> {
        Self::new(alpha, &[])
    }

    /// `alpha(u)` for `u >= 0`.
    pub fn eval(&self, u: f64) -> f64 {
        let mut a = self.initial;
        for &(b, v) in &self.steps {
            if u >= b {
                a = v;
            } else {
                break;
            }
        }
        a
    }

    pub fn sup_alpha(&self) -> f64 {
        self.steps.last().map_or(self.initial, |&(_, a)| a)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.steps.iter().map(|&(u, _)| u).collect()
    }
}

/// Loss VaR: the supremum over capital `u >= 0` of `VaR_{alpha(u)}(X) - u`.
///
/// On finite support the term decreases once `u` exceeds the support range,
/// so the search is truncated there; `alpha`'s breakpoints and `u = 0` are
/// always candidates.
pub fn lvar(d: &DiscreteDistribution, alpha: &AlphaFunction, u_grid: &[f64]) -> ExtReal {
    let cap = d.max_value() - d.min_value();
    let mut candidates = vec![0.0];
    candidates.extend(alpha.breakpoints());
    candidates.extend(u_grid.iter().copied());
    let mut best = f64::NEG_INFINITY;
    for u in candidates {
        if !(0.0..=cap).contains(&u) {
            continue;
        }
        let level = Level::from_trusted(alpha.eval(u));
        let term = d.quantile_value(level.get()) - u;
        if term > best {
            best = term;
        }
    }
    ExtReal::finite(best)
}

/// The target risk profile whose VaR-family adjusted measure equals
/// `LVaR_alpha`: the left inverse of `alpha` on `[alpha(0), sup alpha]`,
/// zero below and `+inf` above.
pub fn alpha_to_profile(alpha: &AlphaFunction) -> TargetRiskProfile {
    let mut rows = vec![(alpha.initial, ExtReal::Finite(0.0))];
    for &(u, a) in &alpha.steps {
        rows.push((a, ExtReal::finite(u)));
    }
    TargetRiskProfile::tabulated(&rows).expect("alpha validation makes the rows a valid profile")
}
