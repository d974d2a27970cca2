//! Small dense real/complex matrix kernel.

mod det;
mod eigen;
mod matrix;
mod toeplitz;

pub use det::{adjugate, det, solve};
pub use eigen::{eigenpairs, eigenvalues, EigenPair, Spectrum};
pub use matrix::{ComplexMatrix, Matrix, RealMatrix, Scalar};
pub use toeplitz::{toeplitz_from_differences, toeplitz_with_ones};

pub(crate) use det::det_unchecked;
