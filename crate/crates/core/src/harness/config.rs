use serde::{Deserialize, Serialize};

use crate::channels::{
    make_amplitude_damping, make_depolarizing, make_phase_damping, make_unitary_channel, rx, ChannelSpec, KrausChannel,
};
use crate::error::{Error, Result};

/// Most circuits a single job may contain.
pub const MAX_CIRCUITS_PER_JOB: u64 = 100;

/// Per-gate noise, applied after every gate in the order listed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub amplitude_damping: f64,
    pub phase_damping: f64,
    pub depolarizing: f64,
}

impl NoiseConfig {
    pub fn is_noiseless(&self) -> bool {
        self.amplitude_damping == 0.0 && self.phase_damping == 0.0 && self.depolarizing == 0.0
    }

    /// Composite noise channel, or `None` when every rate is zero.
    pub fn channel(&self) -> Result<Option<KrausChannel>> {
        let mut parts = Vec::new();
        if self.amplitude_damping != 0.0 {
            parts.push(make_amplitude_damping(self.amplitude_damping)?);
        }
        if self.phase_damping != 0.0 {
            parts.push(make_phase_damping(self.phase_damping)?);
        }
        if self.depolarizing != 0.0 {
            parts.push(make_depolarizing(self.depolarizing)?);
        }
        let mut iter = parts.into_iter();
        let Some(first) = iter.next() else { return Ok(None) };
        iter.try_fold(first, |acc, next| acc.then(&next)).map(Some)
    }
}

/// Slow miscalibration of the gate, as an extra x rotation.
///
/// `linear_angle` and `random_walk` shift every gate of job `j` by the same
/// angle. A qubit gate that is identical throughout a circuit keeps `W_4`
/// at zero whatever its angle, so these models only move witnesses that
/// are sensitive to the gate itself (`F1`, `W_3` with noise, the raw
/// sequence). `gate_ramp` makes the `m`-th gate of a circuit in job `j`
/// over-rotate by `rate * j * m`, which breaks the repeated-operation
/// assumption and shows up in `W_4`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum DriftModel {
    #[default]
    None,
    LinearAngle { rate: f64 },
    RandomWalk { step: f64 },
    GateRamp { rate: f64 },
}

impl DriftModel {
    pub fn is_none(&self) -> bool {
        matches!(self, DriftModel::None)
    }
}

fn default_device() -> String {
    "simulated".into()
}
fn default_offset() -> usize {
    2
}
fn default_k_min() -> usize {
    2
}
fn default_k_max() -> usize {
    9
}
fn default_shots() -> u64 {
    20000
}
fn default_circuits() -> u64 {
    12
}
fn default_jobs() -> usize {
    1
}
fn default_basis_one() -> usize {
    1
}

/// Simulated experiment: `jobs` jobs, each running `circuits_per_k`
/// circuits of `shots` shots for every gate count `k` in `k_min..=k_max`.
/// A circuit prepares `initial_state`, applies the gate `k` times and
/// measures the projector on `measured_state`; the first `offset` gates
/// count as preparation, so the witness index is `n = k - offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_device")]
    pub device: String,
    #[serde(default)]
    pub channel: ChannelSpec,
    #[serde(default = "default_offset")]
    pub offset: usize,
    #[serde(default = "default_k_min")]
    pub k_min: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_circuits")]
    pub circuits_per_k: u64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub drift: DriftModel,
    #[serde(default = "default_basis_one")]
    pub initial_state: usize,
    #[serde(default = "default_basis_one")]
    pub measured_state: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Report exact probabilities instead of sampling counts.
    #[serde(default)]
    pub exact: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            device: default_device(),
            channel: ChannelSpec::default(),
            offset: default_offset(),
            k_min: default_k_min(),
            k_max: default_k_max(),
            shots: default_shots(),
            circuits_per_k: default_circuits(),
            jobs: default_jobs(),
            noise: NoiseConfig::default(),
            drift: DriftModel::None,
            initial_state: default_basis_one(),
            measured_state: default_basis_one(),
            seed: None,
            exact: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn k_values(&self) -> std::ops::RangeInclusive<usize> {
        self.k_min..=self.k_max
    }

    /// Effective shots per `k` per job after pooling the circuits.
    pub fn pooled_shots(&self) -> u64 {
        self.shots * self.circuits_per_k
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_min > self.k_max {
            return Err(Error::invalid(format!("k_min {} exceeds k_max {}", self.k_min, self.k_max)));
        }
        let circuits = (self.k_max - self.k_min + 1) as u64 * self.circuits_per_k;
        if circuits > MAX_CIRCUITS_PER_JOB {
            return Err(Error::invalid(format!(
                "a job would contain {circuits} circuits; the limit is {MAX_CIRCUITS_PER_JOB}"
            )));
        }
        if self.shots == 0 || self.circuits_per_k == 0 {
            return Err(Error::invalid("shots and circuits_per_k must be positive"));
        }
        if self.jobs == 0 {
            return Err(Error::invalid("at least one job is required"));
        }
        let rates = [self.noise.amplitude_damping, self.noise.phase_damping, self.noise.depolarizing];
        if rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(Error::invalid("noise rates must lie in [0, 1]"));
        }
        let drift_value = match self.drift {
            DriftModel::None => 0.0,
            DriftModel::LinearAngle { rate } | DriftModel::GateRamp { rate } => rate,
            DriftModel::RandomWalk { step } => step,
        };
        if !drift_value.is_finite() {
            return Err(Error::invalid("drift parameter must be finite"));
        }
        let gate = self.channel.build()?;
        let d = gate.dim();
        if d != 2 && !(self.noise.is_noiseless() && self.drift.is_none()) {
            return Err(Error::invalid(format!("noise and drift models are defined for qubits; the gate has dimension {d}")));
        }
        if self.initial_state >= d || self.measured_state >= d {
            return Err(Error::invalid(format!("basis states must be below the gate dimension {d}")));
        }
        Ok(())
    }

    /// Gate plus noise with an extra x rotation by `angle`.
    pub(crate) fn gate_with_offset(&self, base: &KrausChannel, noise: Option<&KrausChannel>, angle: f64) -> Result<KrausChannel> {
        let gate = if angle == 0.0 { base.clone() } else { base.then(&make_unitary_channel(&rx(angle))?)? };
        match noise {
            Some(n) => gate.then(n),
            None => Ok(gate),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_job_protocol() {
        let cfg = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!((cfg.offset, cfg.k_min, cfg.k_max, cfg.shots, cfg.circuits_per_k), (2, 2, 9, 20000, 12));
        assert_eq!(cfg.pooled_shots(), 240000);
        assert_eq!(cfg.k_values().count(), 8);
    }

    #[test]
    fn circuit_limit() {
        let err = ExperimentConfig::from_json(r#"{"circuits_per_k": 13}"#).unwrap_err();
        assert!(err.to_string().contains("104 circuits"), "{err}");
    }

    #[test]
    fn drift_and_noise_parse() {
        let cfg = ExperimentConfig::from_json(
            r#"{"noise": {"amplitude_damping": 0.001}, "drift": {"model": "gate_ramp", "rate": 1e-4}, "jobs": 3}"#,
        )
        .unwrap();
        assert_eq!(cfg.drift, DriftModel::GateRamp { rate: 1e-4 });
        assert!(cfg.noise.channel().unwrap().is_some());
        assert!(ExperimentConfig::from_json(r#"{"drift": {"model": "sideways"}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"noise": {"amplitude_damping": 2}}"#).is_err());
    }

    #[test]
    fn qutrit_gate_rejects_qubit_noise() {
        let text = r#"{"channel": "identity(3)", "noise": {"depolarizing": 0.01}}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
        assert!(ExperimentConfig::from_json(r#"{"channel": "identity(3)"}"#).is_ok());
    }
}
