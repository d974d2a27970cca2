use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::{CLAMP_HARD, CLAMP_SILENT};

/// Outcome probabilities `p_0 .. p_{L-1}`, `p_n` being the probability after
/// exactly `n` applications of the repeated operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilitySequence(Vec<f64>);

impl ProbabilitySequence {
    /// Validates that every value is finite and inside [0, 1].
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!("probability p_{i} = {v} is outside [0, 1]")));
        }
        Ok(Self(values))
    }

    /// Clamps roundoff excursions into [0, 1]. Excursions beyond
    /// `CLAMP_SILENT` are logged; beyond `CLAMP_HARD` they are an error.
    pub fn clamped(values: Vec<f64>) -> Result<Self> {
        let mut out = values;
        for (i, v) in out.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(Error::invalid(format!("probability p_{i} is not finite")));
            }
            let excess = if *v < 0.0 {
                -*v
            } else if *v > 1.0 {
                *v - 1.0
            } else {
                0.0
            };
            if excess > CLAMP_HARD {
                return Err(Error::invalid(format!(
                    "probability p_{i} = {v} is outside [0, 1] by {excess:.3e}"
                )));
            }
            if excess > CLAMP_SILENT {
                log::warn!("clamping p_{i} = {v} into [0, 1] (excess {excess:.3e})");
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok(Self(out))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for ProbabilitySequence {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for ProbabilitySequence {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ProbabilitySequence> for Vec<f64> {
    fn from(p: ProbabilitySequence) -> Self {
        p.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(ProbabilitySequence::new(vec![0.0, 1.0, 0.5]).is_ok());
        assert!(ProbabilitySequence::new(vec![1.1]).is_err());
        assert!(ProbabilitySequence::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn clamp_policy() {
        let p = ProbabilitySequence::clamped(vec![-1e-12, 1.0 + 1e-8, 0.3]).unwrap();
        assert_eq!(p.values(), &[0.0, 1.0, 0.3]);
        assert!(ProbabilitySequence::clamped(vec![1.01]).is_err());
    }
}
