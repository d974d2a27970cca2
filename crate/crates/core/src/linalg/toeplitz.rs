use super::matrix::RealMatrix;
use crate::error::{Error, Result};

/// The `n x n` matrix with entries `p[j+k] - p[j+k+1]`. Needs at least
/// `2n` values.
pub fn toeplitz_from_differences(p: &[f64], n: usize) -> Result<RealMatrix> {
    if n == 0 {
        return Err(Error::invalid("witness order must be positive"));
    }
    if p.len() < 2 * n {
        return Err(Error::Length { required: 2 * n, actual: p.len() });
    }
    Ok(RealMatrix::from_fn(n, n, |j, k| p[j + k] - p[j + k + 1]))
}

/// The `(n+1) x (n+1)` matrix with rows `(p[j], .., p[j+n])` for
/// `j < n` and a final row of ones.
pub fn toeplitz_with_ones(p: &[f64], n: usize) -> Result<RealMatrix> {
    if n == 0 {
        return Err(Error::invalid("witness order must be positive"));
    }
    if p.len() < 2 * n {
        return Err(Error::Length { required: 2 * n, actual: p.len() });
    }
    Ok(RealMatrix::from_fn(n + 1, n + 1, |j, k| if j == n { 1.0 } else { p[j + k] }))
}
