//! Dimension witnesses of a probability sequence and their derivatives.
//!
//! All formulas index the sequence absolutely: `p[n]` is the probability
//! after exactly `n` applications of the operation.

mod derivatives;

pub use derivatives::{witness_gradient, witness_hessian};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{det, toeplitz_from_differences, toeplitz_with_ones};

/// Which witness to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum WitnessKind {
    /// Determinant of the `N x N` difference Toeplitz matrix.
    W(usize),
    /// Unitary-qubit witness, uses `p_0 .. p_4`.
    F1,
    /// Almost-unitary qubit witness, uses `p_0 .. p_6`.
    F2,
}

impl WitnessKind {
    /// Number of leading sequence values the witness reads.
    pub fn required_length(self) -> usize {
        match self {
            WitnessKind::W(n) => 2 * n,
            WitnessKind::F1 => 5,
            WitnessKind::F2 => 7,
        }
    }

    pub fn label(self) -> String {
        match self {
            WitnessKind::W(n) => format!("W{n}"),
            WitnessKind::F1 => "F1".into(),
            WitnessKind::F2 => "F2".into(),
        }
    }

    /// Parses a comma-separated list such as `w3,w4,f1,f2`.
    pub fn parse_list(s: &str) -> Result<Vec<WitnessKind>> {
        s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::parse).collect()
    }

    fn check(self, p: &[f64]) -> Result<()> {
        if let WitnessKind::W(0) = self {
            return Err(Error::invalid("witness order must be positive"));
        }
        let required = self.required_length();
        if p.len() < required {
            return Err(Error::Length { required, actual: p.len() });
        }
        Ok(())
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for WitnessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "f1" => Ok(WitnessKind::F1),
            "f2" => Ok(WitnessKind::F2),
            _ => lower
                .strip_prefix('w')
                .and_then(|n| n.parse::<usize>().ok())
                .filter(|&n| n > 0)
                .map(WitnessKind::W)
                .ok_or_else(|| Error::invalid(format!("unknown witness kind '{s}' (expected wN, f1 or f2)"))),
        }
    }
}

impl TryFrom<String> for WitnessKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<WitnessKind> for String {
    fn from(k: WitnessKind) -> Self {
        k.label()
    }
}

/// `det W_N` with `W_{N,jk} = p_{j+k} - p_{j+k+1}`.
pub fn witness_w(p: &[f64], n: usize) -> Result<f64> {
    det(&toeplitz_from_differences(p, n)?)
}

/// `det` of the `(N+1) x (N+1)` matrix with rows `(p_j .. p_{j+N})` and a
/// final row of ones. Equal to [`witness_w`] by column differencing.
pub fn witness_w_tilde(p: &[f64], n: usize) -> Result<f64> {
    det(&toeplitz_with_ones(p, n)?)
}

/// `p1^2 + p0 (p3 - p2) - p2 (p1 - p3) - p3^2 + (p2 - p1) p4`.
pub fn witness_f1(p: &[f64]) -> Result<f64> {
    WitnessKind::F1.check(p)?;
    Ok(p[1] * p[1] + p[0] * (p[3] - p[2]) - p[2] * (p[1] - p[3]) - p[3] * p[3] + (p[2] - p[1]) * p[4])
}

/// `(p2 - 2 p3 + p4)(p6 - 2 p3 + p0) - (p2 - p1 + p4 - p5)^2`.
pub fn witness_f2(p: &[f64]) -> Result<f64> {
    WitnessKind::F2.check(p)?;
    let a = p[2] - 2.0 * p[3] + p[4];
    let b = p[6] - 2.0 * p[3] + p[0];
    let c = p[2] - p[1] + p[4] - p[5];
    Ok(a * b - c * c)
}

/// Evaluates any witness kind.
pub fn evaluate(kind: WitnessKind, p: &[f64]) -> Result<f64> {
    kind.check(p)?;
    match kind {
        WitnessKind::W(n) => witness_w(p, n),
        WitnessKind::F1 => witness_f1(p),
        WitnessKind::F2 => witness_f2(p),
    }
}

/// `(a - b)^2 (a b - 1)(a - 1)(b - 1)`, or with `squared` the square of
/// `(a - b)(a b - 1)(a - 1)(b - 1)`. Vanishes on every pair drawn from the
/// superoperator spectrum `{1, 1, e^{i phi}, e^{-i phi}}` of a qubit unitary.
pub fn eigenvalue_constraint(alpha: Complex64, beta: Complex64, squared: bool) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let base = (alpha - beta) * (alpha * beta - one) * (alpha - one) * (beta - one);
    if squared {
        base * base
    } else {
        (alpha - beta) * base
    }
}
