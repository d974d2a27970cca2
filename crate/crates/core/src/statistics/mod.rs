//! Shot-noise error propagation for witnesses of measured frequencies.
//!
//! With `p~_j = n_j / N_j` and independent binomial counts, a witness `F`
//! evaluated at the frequencies is biased by `sum_j F_jj b_j / (2 N_j)` and
//! has first-order variance `sum_j F_j^2 b_j / N_j`, where `b_j = p_j(1-p_j)`
//! and subscripts denote partial derivatives. When the gradient is small the
//! second-order term `sum_ij F_ij^2 b_i b_j / (2 N_i N_j)` competes.

mod closed;
mod sampling;

pub use closed::{second_order_f2_closed, variance_f1_closed, variance_f2_closed, variance_wn_closed};
pub use sampling::{monte_carlo, sample_counts, sample_counts_with, MonteCarloSummary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sequence::ProbabilitySequence;
use crate::witnesses::{evaluate, witness_gradient, witness_hessian, WitnessKind};

/// Success counts and shot totals per sequence index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotCounts {
    successes: Vec<u64>,
    shots: Vec<u64>,
}

impl ShotCounts {
    pub fn new(successes: Vec<u64>, shots: Vec<u64>) -> Result<Self> {
        if successes.len() != shots.len() {
            return Err(Error::dim(format!(
                "{} success counts but {} shot totals",
                successes.len(),
                shots.len()
            )));
        }
        if let Some(j) = shots.iter().position(|&n| n == 0) {
            return Err(Error::invalid(format!("index {j} has zero shots")));
        }
        if let Some(j) = successes.iter().zip(&shots).position(|(n, total)| n > total) {
            return Err(Error::invalid(format!(
                "index {j} has {} successes out of {} shots",
                successes[j], shots[j]
            )));
        }
        Ok(Self { successes, shots })
    }

    pub fn len(&self) -> usize {
        self.shots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shots.is_empty()
    }

    pub fn successes(&self) -> &[u64] {
        &self.successes
    }

    pub fn shots(&self) -> &[u64] {
        &self.shots
    }

    /// Adds counts index by index; both sides must have the same length.
    pub fn pooled(&self, other: &ShotCounts) -> Result<ShotCounts> {
        if other.len() != self.len() {
            return Err(Error::dim("cannot pool counts of different lengths"));
        }
        ShotCounts::new(
            self.successes.iter().zip(&other.successes).map(|(a, b)| a + b).collect(),
            self.shots.iter().zip(&other.shots).map(|(a, b)| a + b).collect(),
        )
    }
}

/// `p~_j = n_j / N_j`.
pub fn empirical_probs(counts: &ShotCounts) -> Result<ProbabilitySequence> {
    ProbabilitySequence::new(
        counts
            .successes
            .iter()
            .zip(&counts.shots)
            .map(|(&n, &total)| n as f64 / total as f64)
            .collect(),
    )
}

/// Binomial variance `p(1-p)` of a single shot, with `p` clamped to [0, 1].
pub fn binomial_variance(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    p * (1.0 - p)
}

/// Third cumulant `p(1-p)(1-2p)` of a single shot.
pub fn third_cumulant(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    p * (1.0 - p) * (1.0 - 2.0 * p)
}

/// Leading `required_length` probabilities and shot counts as floats.
fn prepare<'a>(kind: WitnessKind, p: &'a [f64], shots: &[u64]) -> Result<(&'a [f64], Vec<f64>)> {
    let len = kind.required_length();
    if p.len() < len {
        return Err(Error::Length { required: len, actual: p.len() });
    }
    if shots.len() != p.len() {
        return Err(Error::dim(format!(
            "{} probabilities but {} shot counts",
            p.len(),
            shots.len()
        )));
    }
    if let Some(j) = shots[..len].iter().position(|&n| n == 0) {
        return Err(Error::invalid(format!("index {j} has zero shots")));
    }
    Ok((&p[..len], shots[..len].iter().map(|&n| n as f64).collect()))
}

/// Leading bias `<dF> = sum_j F_jj b_j / (2 N_j)`.
pub fn delta_shift(kind: WitnessKind, p: &[f64], shots: &[u64]) -> Result<f64> {
    let (p, n) = prepare(kind, p, shots)?;
    let h = witness_hessian(kind, p)?;
    Ok((0..p.len()).map(|j| h[(j, j)] * binomial_variance(p[j]) / (2.0 * n[j])).sum())
}

/// First-order variance `sum_j F_j^2 b_j / N_j`.
pub fn delta_variance(kind: WitnessKind, p: &[f64], shots: &[u64]) -> Result<f64> {
    let (p, n) = prepare(kind, p, shots)?;
    let g = witness_gradient(kind, p)?;
    Ok((0..p.len()).map(|j| g[j] * g[j] * binomial_variance(p[j]) / n[j]).sum())
}

/// Second-order variance `sum_ij F_ij^2 b_i b_j / (2 N_i N_j)`.
pub fn second_order_variance(kind: WitnessKind, p: &[f64], shots: &[u64]) -> Result<f64> {
    let (p, n) = prepare(kind, p, shots)?;
    let h = witness_hessian(kind, p)?;
    let b: Vec<f64> = p.iter().map(|&x| binomial_variance(x)).collect();
    let mut acc = 0.0;
    for i in 0..p.len() {
        for j in 0..p.len() {
            acc += h[(i, j)].powi(2) * b[i] * b[j] / (2.0 * n[i] * n[j]);
        }
    }
    Ok(acc)
}

/// Cross term between first and second order through the third cumulant,
/// and the bound that shows it is down by `N^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossTerm {
    /// `sum_i F_ii F_i t_i / N_i^2`.
    pub value: f64,
    /// `sum_i (a_i^2 + c_i^2) / (2 sqrt(N_i))` with
    /// `a_i = F_i sqrt(b_i / N_i)` and `c_i = F_ii sqrt(b_i) (1 - 2 p_i) / N_i`;
    /// `|value| <= bound` termwise by `2ac <= a^2 + c^2`.
    pub bound: f64,
}

pub fn third_cumulant_term(kind: WitnessKind, p: &[f64], shots: &[u64]) -> Result<CrossTerm> {
    let (p, n) = prepare(kind, p, shots)?;
    let g = witness_gradient(kind, p)?;
    let h = witness_hessian(kind, p)?;
    let mut value = 0.0;
    let mut bound = 0.0;
    for i in 0..p.len() {
        let b = binomial_variance(p[i]);
        value += h[(i, i)] * g[i] * third_cumulant(p[i]) / (n[i] * n[i]);
        let a = g[i] * (b / n[i]).sqrt();
        let c = h[(i, i)] * b.sqrt() * (1.0 - 2.0 * p[i].clamp(0.0, 1.0)) / n[i];
        bound += (a * a + c * c) / (2.0 * n[i].sqrt());
    }
    Ok(CrossTerm { value, bound })
}

/// Witness value with shot-noise diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub value: f64,
    /// Leading bias `Delta F`.
    pub shift: f64,
    pub variance_first: f64,
    pub variance_second: f64,
    /// `sqrt(variance_first + variance_second)`.
    pub sigma: f64,
    /// `sqrt(variance_first)`.
    pub sigma_first_only: f64,
}

impl ErrorReport {
    /// Report for exactly known probabilities: every error column is zero.
    pub fn exact(value: f64) -> Self {
        Self { value, shift: 0.0, variance_first: 0.0, variance_second: 0.0, sigma: 0.0, sigma_first_only: 0.0 }
    }

    /// Bias-corrected value `F - Delta F`.
    pub fn corrected(&self) -> f64 {
        self.value - self.shift
    }
}

/// Evaluates `kind` at the measured frequencies and propagates shot noise,
/// with derivatives taken at the same frequencies.
pub fn error_report(kind: WitnessKind, p: &[f64], shots: &[u64]) -> Result<ErrorReport> {
    let value = evaluate(kind, p)?;
    let shift = delta_shift(kind, p, shots)?;
    let variance_first = delta_variance(kind, p, shots)?;
    let variance_second = second_order_variance(kind, p, shots)?;
    Ok(ErrorReport {
        value,
        shift,
        variance_first,
        variance_second,
        sigma: (variance_first + variance_second).sqrt(),
        sigma_first_only: variance_first.sqrt(),
    })
}

/// [`error_report`] straight from counts.
pub fn error_report_from_counts(kind: WitnessKind, counts: &ShotCounts) -> Result<ErrorReport> {
    let p = empirical_probs(counts)?;
    error_report(kind, &p, counts.shots())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SQRT_X: [f64; 8] = [1.0, 0.5, 0.0, 0.5, 1.0, 0.5, 0.0, 0.5];

    #[test]
    fn empirical_frequencies() {
        let c = ShotCounts::new(vec![0, 20000, 9871], vec![100, 20000, 20000]).unwrap();
        let p = empirical_probs(&c).unwrap();
        assert_eq!(p.values(), &[0.0, 1.0, 0.49355]);
    }

    #[test]
    fn count_validation() {
        assert!(ShotCounts::new(vec![3], vec![2]).is_err());
        assert!(ShotCounts::new(vec![0], vec![0]).is_err());
        assert!(ShotCounts::new(vec![0, 1], vec![2]).is_err());
    }

    #[test]
    fn zero_one_probabilities_have_no_error() {
        let p = [1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0, 0.0];
        let shots = [1000; 8];
        for kind in [WitnessKind::W(3), WitnessKind::W(4), WitnessKind::F1, WitnessKind::F2] {
            assert_eq!(delta_shift(kind, &p, &shots).unwrap(), 0.0);
            assert_eq!(delta_variance(kind, &p, &shots).unwrap(), 0.0);
            assert_eq!(second_order_variance(kind, &p, &shots).unwrap(), 0.0);
            let t = third_cumulant_term(kind, &p, &shots).unwrap();
            assert_eq!((t.value, t.bound), (0.0, 0.0));
        }
    }

    #[test]
    fn shift_for_f1_at_uniform_half() {
        // term-by-term: F1 Hessian diagonal is (0, 2, 0, -2, 0)
        let p = [0.5; 5];
        let shots = [100; 5];
        let by_hand = (2.0 * 0.25 / 200.0) + (-2.0 * 0.25 / 200.0);
        assert_eq!(delta_shift(WitnessKind::F1, &p, &shots).unwrap(), by_hand);
        let p = [0.2, 0.4, 0.5, 0.7, 0.9];
        let by_hand = 2.0 * 0.4 * 0.6 / 200.0 - 2.0 * 0.7 * 0.3 / 200.0;
        assert!((delta_shift(WitnessKind::F1, &p, &shots).unwrap() - by_hand).abs() < 1e-18);
    }

    #[test]
    fn linear_witness_has_no_second_order() {
        let p = [0.3, 0.6];
        assert_eq!(second_order_variance(WitnessKind::W(1), &p, &[50, 50]).unwrap(), 0.0);
        let v = delta_variance(WitnessKind::W(1), &p, &[50, 50]).unwrap();
        assert!((v - (0.21 + 0.24) / 50.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_binomial_has_no_cross_term() {
        let t = third_cumulant_term(WitnessKind::F2, &[0.5; 7], &[20000; 7]).unwrap();
        assert_eq!(t.value, 0.0);
    }

    #[test]
    fn f2_at_ideal_point_is_second_order_dominated() {
        let shots = [20000; 7];
        let first = delta_variance(WitnessKind::F2, &SQRT_X[..7], &shots).unwrap();
        let second = second_order_variance(WitnessKind::F2, &SQRT_X[..7], &shots).unwrap();
        // all three factors of F2 vanish at the ideal sequence, so the gradient does too
        assert_eq!(first, 0.0);
        assert!(second > 0.0);
        let report = error_report(WitnessKind::F2, &SQRT_X[..7], &shots).unwrap();
        assert!(report.sigma >= report.sigma_first_only);
    }

    #[test]
    fn length_and_shot_mismatch() {
        assert!(matches!(delta_shift(WitnessKind::F2, &[0.5; 6], &[10; 6]), Err(Error::Length { .. })));
        assert!(matches!(delta_variance(WitnessKind::F1, &[0.5; 5], &[10; 4]), Err(Error::Dimension(_))));
    }

    proptest! {
        #[test]
        fn variances_are_nonnegative_and_cross_term_bounded(
            p in proptest::collection::vec(0.0f64..1.0, 8),
            n in 10u64..100000,
        ) {
            let shots = vec![n; 8];
            for kind in [WitnessKind::W(2), WitnessKind::W(4), WitnessKind::F1, WitnessKind::F2] {
                let r = error_report(kind, &p, &shots).unwrap();
                prop_assert!(r.variance_first >= 0.0 && r.variance_second >= 0.0);
                prop_assert!(r.sigma >= r.sigma_first_only);
                let t = third_cumulant_term(kind, &p, &shots).unwrap();
                prop_assert!(t.value.abs() <= t.bound * (1.0 + 1e-12) + 1e-300);
            }
        }
    }
}
