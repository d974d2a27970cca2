use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve, ComplexMatrix, Spectrum};
use crate::sequence::ProbabilitySequence;
use crate::tolerances::MODE_IMAGINARY;

/// One term `A lambda^n` of a mode expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub amplitude: Complex64,
    pub eigenvalue: Complex64,
}

/// `p_n = sum_j A_j lambda_j^n`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModeExpansion {
    pub modes: Vec<Mode>,
}

impl ModeExpansion {
    pub fn new(modes: Vec<Mode>) -> Self {
        Self { modes }
    }

    pub fn push(&mut self, amplitude: Complex64, eigenvalue: Complex64) -> &mut Self {
        self.modes.push(Mode { amplitude, eigenvalue });
        self
    }

    /// Complex reconstruction for `n = 0 .. len-1`.
    pub fn evaluate(&self, len: usize) -> Vec<Complex64> {
        let mut powers: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); self.modes.len()];
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            out.push(self.modes.iter().zip(&powers).map(|(m, p)| m.amplitude * p).sum());
            for (p, m) in powers.iter_mut().zip(&self.modes) {
                *p *= m.eigenvalue;
            }
        }
        out
    }

    /// Real parts of the reconstruction, without clamping. Fails when any
    /// imaginary residual exceeds `MODE_IMAGINARY`.
    pub fn raw_values(&self, len: usize) -> Result<Vec<f64>> {
        self.evaluate(len)
            .into_iter()
            .enumerate()
            .map(|(n, z)| {
                if z.im.abs() > MODE_IMAGINARY {
                    Err(Error::invalid(format!(
                        "mode reconstruction of p_{n} has imaginary part {:.3e}; modes must come in conjugate pairs",
                        z.im
                    )))
                } else {
                    Ok(z.re)
                }
            })
            .collect()
    }

    /// Reconstructed probability sequence, clamped into [0, 1].
    pub fn sequence(&self, len: usize) -> Result<ProbabilitySequence> {
        ProbabilitySequence::clamped(self.raw_values(len)?)
    }

    /// Fits amplitudes for the distinct values in `spectrum` to the head of
    /// `p` by solving the Vandermonde system. Eigenvalues closer than
    /// `merge_tol` are merged, so a diagonalizable map with degenerate
    /// eigenvalues yields one mode per distinct value.
    pub fn fit(spectrum: &Spectrum, p: &[f64], merge_tol: f64) -> Result<Self> {
        let mut distinct: Vec<Complex64> = Vec::new();
        for &v in spectrum.values() {
            if !distinct.iter().any(|u| (u - v).norm() <= merge_tol) {
                distinct.push(v);
            }
        }
        let k = distinct.len();
        if p.len() < k {
            return Err(Error::Length { required: k, actual: p.len() });
        }
        let vander = ComplexMatrix::from_fn(k, k, |n, j| distinct[j].powu(n as u32));
        let rhs: Vec<Complex64> = p[..k].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let amps = solve(&vander, &rhs)?;
        Ok(Self {
            modes: amps
                .into_iter()
                .zip(distinct)
                .map(|(amplitude, eigenvalue)| Mode { amplitude, eigenvalue })
                .collect(),
        })
    }
}

/// Free-function form of [`ModeExpansion::sequence`].
pub fn sequence_from_modes(modes: &ModeExpansion, len: usize) -> Result<ProbabilitySequence> {
    modes.sequence(len)
}

/// The damped-rotation mode set: a constant `offset` plus conjugate modes
/// of amplitude `amplitude` at `+-i (1 - eps)`.
pub fn damped_rotation_modes(offset: f64, amplitude: f64, eps: f64) -> ModeExpansion {
    let a = Complex64::new(amplitude, 0.0);
    let mut m = ModeExpansion::default();
    m.push(Complex64::new(offset, 0.0), Complex64::new(1.0, 0.0))
        .push(a, Complex64::new(0.0, 1.0 - eps))
        .push(a, Complex64::new(0.0, -(1.0 - eps)));
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_constant_mode() {
        let mut m = ModeExpansion::default();
        m.push(c(0.5, 0.0), c(1.0, 0.0));
        assert!(m.sequence(5).unwrap().iter().all(|&x| x == 0.5));
    }

    #[test]
    fn sqrt_x_modes() {
        let m = damped_rotation_modes(0.5, 0.25, 0.0);
        let p = m.sequence(8).unwrap();
        let expected = [1.0, 0.5, 0.0, 0.5, 1.0, 0.5, 0.0, 0.5];
        for (a, b) in p.iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn unpaired_mode_is_rejected() {
        let mut m = ModeExpansion::default();
        m.push(c(0.5, 0.0), c(0.0, 1.0));
        assert!(matches!(m.sequence(3), Err(Error::Invalid(_))));
    }
}
