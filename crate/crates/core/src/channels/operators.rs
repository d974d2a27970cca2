use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, ComplexMatrix};
use crate::tolerances::OPERATOR;

fn min_max_real_eigen(m: &ComplexMatrix) -> Result<(f64, f64)> {
    let spectrum = eigenvalues(m)?;
    let (lo, hi) = spectrum
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| (lo.min(z.re), hi.max(z.re)));
    Ok((lo, hi))
}

fn check_hermitian(m: &ComplexMatrix, what: &str) -> Result<usize> {
    let d = m.dim()?;
    let err = m.hermiticity_error();
    if err > OPERATOR {
        return Err(Error::invalid(format!("{what} is not Hermitian (deviation {err:.3e})")));
    }
    Ok(d)
}

/// Projector `|k><k|` in dimension `d`.
pub fn basis_projector(d: usize, k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == k && j == k {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Hermitian, positive semidefinite, unit-trace state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_hermitian(&matrix, "density matrix")?;
        let tr = matrix.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > OPERATOR {
            return Err(Error::invalid(format!("density matrix trace is {tr}, expected 1")));
        }
        let (lo, _) = min_max_real_eigen(&matrix)?;
        if lo < -OPERATOR {
            return Err(Error::invalid(format!(
                "density matrix is not positive semidefinite (min eigenvalue {lo:.3e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// Pure basis state `|k><k|`.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::invalid(format!("basis index {k} out of range for dimension {d}")));
        }
        Ok(Self { matrix: basis_projector(d, k) })
    }

    /// Pure state `|psi><psi|` from an unnormalized vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("state vector has zero or non-finite norm"));
        }
        let d = psi.len();
        let m = ComplexMatrix::from_fn(d, d, |i, j| psi[i] * psi[j].conj() / (norm * norm));
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Embeds into dimension `d + 1` with an unpopulated sink level.
    pub fn extend_with_sink(&self) -> Self {
        let zero = ComplexMatrix::zeros(1, 1);
        Self { matrix: self.matrix.direct_sum(&zero) }
    }
}

/// Effect operator with spectrum in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOperator {
    matrix: ComplexMatrix,
}

impl MeasurementOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_hermitian(&matrix, "measurement operator")?;
        let (lo, hi) = min_max_real_eigen(&matrix)?;
        if lo < -OPERATOR || hi > 1.0 + OPERATOR {
            return Err(Error::invalid(format!(
                "measurement operator spectrum [{lo:.3e}, {hi:.3e}] is not inside [0, 1]"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::invalid(format!("basis index {k} out of range for dimension {d}")));
        }
        Ok(Self { matrix: basis_projector(d, k) })
    }

    pub fn identity(d: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(d) }
    }

    /// Wraps a Heisenberg-evolved operator without re-checking the spectrum.
    pub(crate) fn from_evolved(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Embeds into dimension `d + 1`; the sink level responds with
    /// probability `response`.
    pub fn extend_with_sink(&self, response: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&response) {
            return Err(Error::invalid(format!("sink response {response} outside [0, 1]")));
        }
        let sink = ComplexMatrix::diagonal(&[Complex64::new(response, 0.0)]);
        Ok(Self { matrix: self.matrix.direct_sum(&sink) })
    }
}
