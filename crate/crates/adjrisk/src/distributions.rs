//! Exact finitely-supported distributions and raw sample windows.
//!
//! `DiscreteDistribution` is the ground-truth carrier for the counterexample
//! fixtures and the oracles: every implemented measure is law-invariant, so
//! working with exact discrete laws is equivalent to working with the random
//! variables they are the laws of.

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::measures::Level;

/// Absolute tolerance under which two atom values are merged.
pub const ATOM_MERGE_TOL: f64 = 1e-12;

/// Absolute tolerance for the total-probability check.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// A finitely-supported distribution: strictly increasing atom values with
/// strictly positive probabilities summing to one.
///
/// Immutable after construction and freely shareable across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    values: Vec<f64>,
    probs: Vec<f64>,
    /// Cumulative probabilities; the last entry is pinned to exactly 1.0.
    cum: Vec<f64>,
}

impl DiscreteDistribution {
    /// Builds a distribution from `(value, probability)` atoms.
    ///
    /// Atoms are sorted by value; values closer than [`ATOM_MERGE_TOL`] are
    /// merged with their probabilities added. Probabilities must be strictly
    /// positive and sum to one within [`PROB_SUM_TOL`].
    pub fn new(atoms: &[(f64, f64)]) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        for &(v, p) in atoms {
            if v.is_nan() || v.is_infinite() {
                return Err(Error::InvalidDistribution(format!("non-finite atom value {v}")));
            }
            if !(p > 0.0) || p.is_nan() || p > 1.0 + PROB_SUM_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "atom probability {p} not in (0, 1]"
                )));
            }
        }
        let mut sorted: Vec<(f64, f64)> = atoms.to_vec();
        sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("NaN excluded above"));

        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut probs: Vec<f64> = Vec::with_capacity(sorted.len());
        for (v, p) in sorted {
            match values.last() {
                Some(&last) if (v - last).abs() <= ATOM_MERGE_TOL => {
                    *probs.last_mut().unwrap() += p;
                }
                _ => {
                    values.push(v);
                    probs.push(p);
                }
            }
        }

        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let mut cum = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cum.push(acc);
        }
        *cum.last_mut().unwrap() = 1.0;
        Ok(Self { values, probs, cum })
    }

    /// Point mass at `v`.
    pub fn point_mass(v: f64) -> Result<Self> {
        Self::new(&[(v, 1.0)])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Cumulative probabilities aligned with `values()`; last entry is 1.0.
    pub fn cum(&self) -> &[f64] {
        &self.cum
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.values.iter().copied().zip(self.probs.iter().copied())
    }

    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn max_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(v, p)| v * p).sum()
    }

    /// Left-continuous generalized inverse of the CDF at `p`, as a raw value.
    ///
    /// Smallest atom value whose cumulative probability reaches `p` (within
    /// [`PROB_SUM_TOL`]); the essential infimum for `p = 0`.
    pub(crate) fn quantile_value(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return self.min_value();
        }
        let threshold = p - PROB_SUM_TOL;
        for (i, &c) in self.cum.iter().enumerate() {
            if c >= threshold {
                return self.values[i];
            }
        }
        self.max_value()
    }

    /// `∫_a^b VaR_u du` over the quantile step function, `0 <= a <= b <= 1`.
    pub(crate) fn quantile_integral(&self, a: f64, b: f64) -> f64 {
        let mut total = 0.0;
        let mut lower = 0.0;
        for (i, &c) in self.cum.iter().enumerate() {
            let seg = (c.min(b) - lower.max(a)).max(0.0);
            total += self.values[i] * seg;
            lower = c;
        }
        total
    }
}

/// Left-continuous quantile of `d` at level `p`.
pub fn quantile(d: &DiscreteDistribution, p: Level) -> ExtReal {
    ExtReal::finite(d.quantile_value(p.get()))
}

/// Law of `(V + W) / 2` for independent `V ~ d1`, `W ~ d2`.
pub fn independent_average(
    d1: &DiscreteDistribution,
    d2: &DiscreteDistribution,
) -> Result<DiscreteDistribution> {
    let mut atoms = Vec::with_capacity(d1.len() * d2.len());
    for (v, p) in d1.atoms() {
        for (w, q) in d2.atoms() {
            atoms.push(((v + w) / 2.0, p * q));
        }
    }
    DiscreteDistribution::new(&atoms)
}

/// Law of `lambda * X + m` for `lambda >= 0`; a point mass at `m` if `lambda = 0`.
pub fn scale_shift(d: &DiscreteDistribution, lambda: f64, m: f64) -> Result<DiscreteDistribution> {
    if !(lambda >= 0.0) {
        return Err(Error::Precondition(format!("lambda = {lambda} must be >= 0")));
    }
    if lambda == 0.0 {
        return DiscreteDistribution::point_mass(m);
    }
    let atoms: Vec<(f64, f64)> = d.atoms().map(|(v, p)| (lambda * v + m, p)).collect();
    DiscreteDistribution::new(&atoms)
}

/// Law of `max(X, 0)`: all negative atoms collapse onto 0.
pub fn max_with_zero(d: &DiscreteDistribution) -> DiscreteDistribution {
    let atoms: Vec<(f64, f64)> = d.atoms().map(|(v, p)| (v.max(0.0), p)).collect();
    DiscreteDistribution::new(&atoms).expect("collapsing atoms preserves validity")
}

/// A raw data window (negative daily log-returns in the backtest pipeline).
#[derive(Debug, Clone, PartialEq)]
pub struct SampleWindow {
    points: Vec<f64>,
    sorted: Vec<f64>,
}

impl SampleWindow {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("empty sample window".into()));
        }
        if points.iter().any(|x| x.is_nan() || x.is_infinite()) {
            return Err(Error::InvalidArgument("non-finite sample point".into()));
        }
        let mut sorted = points.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(Self { points, sorted })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Order statistics, ascending.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// The `i`-th smallest element, 1-based.
    pub fn order_statistic(&self, i: usize) -> f64 {
        self.sorted[i - 1]
    }
}

/// Equal-weight law of the window's points, duplicates merged.
pub fn empirical_law(w: &SampleWindow) -> DiscreteDistribution {
    let n = w.len() as f64;
    let atoms: Vec<(f64, f64)> = w.points().iter().map(|&x| (x, 1.0 / n)).collect();
    DiscreteDistribution::new(&atoms).expect("window points form a valid law")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lv(p: f64) -> Level {
        Level::new(p).unwrap()
    }

    fn dist(atoms: &[(f64, f64)]) -> DiscreteDistribution {
        DiscreteDistribution::new(atoms).unwrap()
    }

    #[test]
    fn construction_merges_and_sorts() {
        let d = dist(&[(2.0, 0.25), (1.0, 0.25), (2.0, 0.5)]);
        assert_eq!(d.values(), &[1.0, 2.0]);
        assert_eq!(d.probs(), &[0.25, 0.75]);
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(DiscreteDistribution::new(&[]).is_err());
        assert!(DiscreteDistribution::new(&[(0.0, 0.5)]).is_err());
        assert!(DiscreteDistribution::new(&[(0.0, 0.5), (1.0, -0.5)]).is_err());
        assert!(DiscreteDistribution::new(&[(f64::NAN, 1.0)]).is_err());
    }

    #[test]
    fn quantile_examples() {
        // Appendix-style three-point law with c = 1: jump structure puts the
        // quantile at c for p > 2/3.
        let d = dist(&[(-0.5, 1.0 / 3.0), (0.0, 1.0 / 3.0), (1.0, 1.0 / 3.0)]);
        assert_eq!(quantile(&d, lv(0.7)), ExtReal::Finite(1.0));
        assert_eq!(quantile(&d, lv(2.0 / 3.0)), ExtReal::Finite(0.0));
        assert_eq!(quantile(&d, lv(0.0)), ExtReal::Finite(-0.5));

        let d = dist(&[(0.0, 0.4), (1.0, 0.6)]);
        assert_eq!(quantile(&d, lv(0.4)), ExtReal::Finite(0.0));
    }

    #[test]
    fn independent_average_enumerates_product_pairs() {
        // c = 1 three-point law averaged with itself: 9 product pairs.
        let d = dist(&[(-0.5, 1.0 / 3.0), (0.0, 1.0 / 3.0), (1.0, 1.0 / 3.0)]);
        let avg = independent_average(&d, &d).unwrap();
        assert_eq!(avg.values(), &[-0.5, -0.25, 0.0, 0.25, 0.5, 1.0]);
        let expected = [1.0 / 9.0, 2.0 / 9.0, 1.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 1.0 / 9.0];
        for (p, e) in avg.probs().iter().zip(expected) {
            assert!((p - e).abs() < 1e-15);
        }

        let pm = dist(&[(3.0, 1.0)]);
        let same = independent_average(&pm, &pm).unwrap();
        assert_eq!(same.values(), &[3.0]);

        let d1 = dist(&[(0.0, 0.5), (2.0, 0.5)]);
        let avg = independent_average(&d1, &pm).unwrap();
        assert_eq!(avg.values(), &[1.5, 2.5]);

        let zero = dist(&[(0.0, 1.0)]);
        let avg = independent_average(&d1, &zero).unwrap();
        assert_eq!(avg.values(), &[0.0, 1.0]);
        assert_eq!(avg.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn scale_shift_examples() {
        let d = dist(&[(-2.0, 0.5), (4.0, 0.5)]);
        let doubled = scale_shift(&d, 2.0, 0.0).unwrap();
        assert_eq!(doubled.values(), &[-4.0, 8.0]);

        let same = scale_shift(&d, 1.0, 0.0).unwrap();
        assert_eq!(same, d);

        let pm = scale_shift(&dist(&[(0.0, 1.0)]), 5.0, 3.0).unwrap();
        assert_eq!(pm.values(), &[3.0]);

        let degenerate = scale_shift(&d, 0.0, 7.0).unwrap();
        assert_eq!(degenerate.values(), &[7.0]);

        assert!(scale_shift(&d, -1.0, 0.0).is_err());
    }

    #[test]
    fn max_with_zero_examples() {
        let d = dist(&[(-1.0, 0.4), (1.0, 0.6)]);
        let m = max_with_zero(&d);
        assert_eq!(m.values(), &[0.0, 1.0]);
        assert_eq!(m.probs(), &[0.4, 0.6]);

        let d = dist(&[(0.5, 0.5), (2.0, 0.5)]);
        assert_eq!(max_with_zero(&d), d);

        let d = dist(&[(-2.0, 0.5), (2.0, 0.5)]);
        let m = max_with_zero(&d);
        assert_eq!(m.values(), &[0.0, 2.0]);
    }

    #[test]
    fn empirical_law_counts() {
        let w = SampleWindow::new(vec![1.0, 2.0, 2.0, 3.0]).unwrap();
        let d = empirical_law(&w);
        assert_eq!(d.values(), &[1.0, 2.0, 3.0]);
        assert_eq!(d.probs(), &[0.25, 0.5, 0.25]);

        let single = empirical_law(&SampleWindow::new(vec![5.0]).unwrap());
        assert_eq!(single.values(), &[5.0]);

        let w = SampleWindow::new((1..=60).map(f64::from).collect()).unwrap();
        let d = empirical_law(&w);
        assert_eq!(d.len(), 60);
        assert!(d.probs().iter().all(|&p| (p - 1.0 / 60.0).abs() < 1e-15));
    }

    #[test]
    fn empirical_law_preserves_sample_mean() {
        let points = vec![0.013, -0.002, 0.013, 0.04, -0.019, 0.0];
        let w = SampleWindow::new(points.clone()).unwrap();
        let sample_mean = points.iter().sum::<f64>() / points.len() as f64;
        assert!((empirical_law(&w).mean() - sample_mean).abs() < 1e-12);
    }

    #[test]
    fn window_rejects_bad_input() {
        assert!(SampleWindow::new(vec![]).is_err());
        assert!(SampleWindow::new(vec![1.0, f64::NAN]).is_err());
    }

    fn arb_law(max_atoms: usize) -> impl Strategy<Value = DiscreteDistribution> {
        prop::collection::vec((-50.0f64..50.0, 0.05f64..1.0), 1..=max_atoms).prop_map(|raw| {
            let total: f64 = raw.iter().map(|&(_, w)| w).sum();
            let atoms: Vec<(f64, f64)> = raw.iter().map(|&(v, w)| (v, w / total)).collect();
            DiscreteDistribution::new(&atoms).unwrap()
        })
    }

    proptest! {
        // Brute-force CDF scan oracle: quantile is the smallest value whose
        // cumulative probability reaches p, nondecreasing in p.
        #[test]
        fn quantile_matches_cdf_scan(d in arb_law(8), p in 0.0f64..=1.0) {
            let q = d.quantile_value(p);
            let mut acc = 0.0;
            let mut expected = d.max_value();
            for (v, pr) in d.atoms() {
                acc += pr;
                if acc >= p - 1e-9 {
                    expected = v;
                    break;
                }
            }
            if p == 0.0 {
                expected = d.min_value();
            }
            prop_assert_eq!(q, expected);
        }

        #[test]
        fn quantile_nondecreasing(d in arb_law(8), p in 0.0f64..=1.0, q in 0.0f64..=1.0) {
            let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
            prop_assert!(d.quantile_value(lo) <= d.quantile_value(hi));
        }

        #[test]
        fn independent_average_preserves_mean(d in arb_law(6)) {
            let avg = independent_average(&d, &d).unwrap();
            prop_assert!((avg.mean() - d.mean()).abs() < 1e-12);
        }

        #[test]
        fn scale_shift_transforms_quantiles(d in arb_law(6), lambda in 0.01f64..5.0,
                                            m in -10.0f64..10.0, p in 0.0f64..=1.0) {
            let t = scale_shift(&d, lambda, m).unwrap();
            let got = t.quantile_value(p);
            let want = lambda * d.quantile_value(p) + m;
            prop_assert!((got - want).abs() < 1e-9, "got {} want {}", got, want);
        }
    }
}
