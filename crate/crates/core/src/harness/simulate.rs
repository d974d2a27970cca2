use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DriftModel, ExperimentConfig};
use crate::channels::{DensityMatrix, KrausChannel, MeasurementOperator};
use crate::error::{Error, Result};
use crate::sequence::ProbabilitySequence;
use crate::statistics::{sample_counts_with, ShotCounts};

/// Pooled counts for one gate count `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KCounts {
    pub successes: u64,
    pub shots: u64,
}

/// One job's pooled counts, keyed by physical gate count `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobRecord {
    pub job_id: u64,
    pub counts: BTreeMap<usize, KCounts>,
    pub device: String,
    pub seed: Option<u64>,
    pub timestamp: Option<String>,
}

impl JobRecord {
    pub fn new(job_id: u64, device: impl Into<String>) -> Self {
        Self { job_id, counts: BTreeMap::new(), device: device.into(), seed: None, timestamp: None }
    }

    /// Adds counts for `k`, pooling with any already present.
    pub fn add(&mut self, k: usize, successes: u64, shots: u64) -> Result<()> {
        if successes > shots {
            return Err(Error::invalid(format!("job {} k={k}: {successes} successes out of {shots} shots", self.job_id)));
        }
        let e = self.counts.entry(k).or_insert(KCounts { successes: 0, shots: 0 });
        e.successes += successes;
        e.shots += shots;
        Ok(())
    }

    pub fn is_contiguous(&self) -> bool {
        match (self.counts.keys().next(), self.counts.keys().next_back()) {
            (Some(&lo), Some(&hi)) => hi - lo + 1 == self.counts.len(),
            _ => true,
        }
    }

    /// Counts for witness indices `n = 0 .. len-1` where `k = n + offset`;
    /// missing gate counts are reported by their `k` value.
    pub fn indexed_counts(&self, offset: usize, len: usize) -> std::result::Result<ShotCounts, Vec<usize>> {
        let missing: Vec<usize> = (offset..offset + len).filter(|k| !self.counts.contains_key(k)).collect();
        if !missing.is_empty() {
            return Err(missing);
        }
        let (s, n) = (offset..offset + len).map(|k| (self.counts[&k].successes, self.counts[&k].shots)).unzip();
        ShotCounts::new(s, n).map_err(|_| Vec::new())
    }
}

/// Exact outcome probabilities of one simulated job, keyed by `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobProbabilities {
    pub job_id: u64,
    pub k_min: usize,
    /// `p` for `k = k_min, k_min + 1, ..`.
    pub p: Vec<f64>,
}

impl JobProbabilities {
    /// `p_n` for `n = 0 .. len-1` with `k = n + offset`.
    pub fn indexed(&self, offset: usize, len: usize) -> std::result::Result<Vec<f64>, Vec<usize>> {
        let k_max = self.k_min + self.p.len();
        let missing: Vec<usize> = (offset..offset + len).filter(|&k| k < self.k_min || k >= k_max).collect();
        if !missing.is_empty() {
            return Err(missing);
        }
        Ok((offset..offset + len).map(|k| self.p[k - self.k_min]).collect())
    }
}

/// Per-job constant angle offsets for the linear and random-walk models.
fn job_angles(cfg: &ExperimentConfig, seed: u64) -> Vec<f64> {
    match cfg.drift {
        DriftModel::None | DriftModel::GateRamp { .. } => vec![0.0; cfg.jobs],
        DriftModel::LinearAngle { rate } => (0..cfg.jobs).map(|j| rate * j as f64).collect(),
        DriftModel::RandomWalk { step } => {
            // separate stream from the per-job sampling streams
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            let mut angle = 0.0;
            (0..cfg.jobs)
                .map(|j| {
                    if j > 0 {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        angle += step * z;
                    }
                    angle
                })
                .collect()
        }
    }
}

/// `p_k = Tr[P R_1(R_2(..R_k(M)))]` where `R_m` is the `m`-th gate of the
/// circuit in physical order.
fn circuit_probabilities(
    cfg: &ExperimentConfig,
    state: &DensityMatrix,
    measurement: &MeasurementOperator,
    gate_at: impl Fn(usize) -> Result<KrausChannel>,
) -> Result<Vec<f64>> {
    let mut raw = Vec::new();
    for k in cfg.k_values() {
        let mut evolved = measurement.clone();
        for m in (1..=k).rev() {
            evolved = gate_at(m)?.apply_heisenberg(&evolved)?;
        }
        raw.push(crate::channels::trace_product(state.matrix(), evolved.matrix()).re);
    }
    Ok(ProbabilitySequence::clamped(raw)?.into_inner())
}

/// Exact per-job probabilities including noise and drift.
pub fn simulate_probabilities(cfg: &ExperimentConfig) -> Result<Vec<JobProbabilities>> {
    cfg.validate()?;
    let seed = cfg.seed.unwrap_or(0);
    let base = cfg.channel.build()?;
    let noise = cfg.noise.channel()?;
    let d = base.dim();
    let state = DensityMatrix::basis(d, cfg.initial_state)?;
    let measurement = MeasurementOperator::basis(d, cfg.measured_state)?;
    let angles = job_angles(cfg, seed);
    (0..cfg.jobs)
        .into_par_iter()
        .map(|j| {
            let p = match cfg.drift {
                DriftModel::GateRamp { rate } => circuit_probabilities(cfg, &state, &measurement, |m| {
                    cfg.gate_with_offset(&base, noise.as_ref(), rate * j as f64 * m as f64)
                })?,
                _ => {
                    let gate = cfg.gate_with_offset(&base, noise.as_ref(), angles[j])?;
                    let seq = gate.raw_sequence(&state, &measurement, cfg.k_max + 1)?;
                    ProbabilitySequence::clamped(seq[cfg.k_min..].to_vec())?.into_inner()
                }
            };
            Ok(JobProbabilities { job_id: j as u64, k_min: cfg.k_min, p })
        })
        .collect()
}

/// Simulates every job and samples pooled binomial counts
/// (`circuits_per_k * shots` per `k`). Job `j` draws from stream `j` of
/// the seed, so the output does not depend on scheduling.
pub fn simulate_experiment(cfg: &ExperimentConfig) -> Result<Vec<JobRecord>> {
    let seed = cfg.seed.unwrap_or(0);
    let probs = simulate_probabilities(cfg)?;
    let shots = vec![cfg.pooled_shots(); cfg.k_values().count()];
    probs
        .into_par_iter()
        .map(|job| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(job.job_id);
            let counts = sample_counts_with(&job.p, &shots, &mut rng)?;
            let mut rec = JobRecord::new(job.job_id, cfg.device.clone());
            rec.seed = Some(seed);
            for (i, k) in cfg.k_values().enumerate() {
                rec.add(k, counts.successes()[i], counts.shots()[i])?;
            }
            Ok(rec)
        })
        .collect()
}
