use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ShotCounts;
use crate::error::{Error, Result};
use crate::witnesses::{evaluate, WitnessKind};

/// Draws `n_j ~ Binomial(N_j, p_j)` independently for each index.
pub fn sample_counts_with(p: &[f64], shots: &[u64], rng: &mut impl Rng) -> Result<ShotCounts> {
    if p.len() != shots.len() {
        return Err(Error::dim(format!("{} probabilities but {} shot counts", p.len(), shots.len())));
    }
    let mut successes = Vec::with_capacity(p.len());
    for (j, (&pj, &nj)) in p.iter().zip(shots).enumerate() {
        if !(0.0..=1.0).contains(&pj) {
            return Err(Error::invalid(format!("p[{j}] = {pj} is outside [0, 1]")));
        }
        let dist = Binomial::new(nj, pj).map_err(|e| Error::invalid(format!("index {j}: {e}")))?;
        successes.push(dist.sample(rng));
    }
    ShotCounts::new(successes, shots.to_vec())
}

/// [`sample_counts_with`] from a fresh ChaCha8 generator.
pub fn sample_counts(p: &[f64], shots: &[u64], seed: u64) -> Result<ShotCounts> {
    sample_counts_with(p, shots, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Generator for Monte Carlo trial `trial`: same key, separate stream, so
/// results do not depend on thread scheduling.
pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Empirical distribution of `F(p~) - F(p)` over simulated experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSummary {
    pub trials: usize,
    /// `F(p)` at the true probabilities.
    pub exact: f64,
    /// Mean of `F(p~) - F(p)`.
    pub mean_shift: f64,
    /// Standard error of `mean_shift`.
    pub shift_stderr: f64,
    /// Unbiased sample variance of `F(p~)`.
    pub variance: f64,
}

pub fn monte_carlo(kind: WitnessKind, p: &[f64], shots: &[u64], trials: usize, seed: u64) -> Result<MonteCarloSummary> {
    if trials < 2 {
        return Err(Error::invalid("Monte Carlo needs at least two trials"));
    }
    let exact = evaluate(kind, p)?;
    let deltas: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| -> Result<f64> {
            let counts = sample_counts_with(p, shots, &mut trial_rng(seed, t))?;
            let freq: Vec<f64> =
                counts.successes().iter().zip(shots).map(|(&k, &n)| k as f64 / n as f64).collect();
            Ok(evaluate(kind, &freq)? - exact)
        })
        .collect::<Result<_>>()?;
    let t = trials as f64;
    let mean = deltas.iter().sum::<f64>() / t;
    let variance = deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (t - 1.0);
    Ok(MonteCarloSummary { trials, exact, mean_shift: mean, shift_stderr: (variance / t).sqrt(), variance })
}
