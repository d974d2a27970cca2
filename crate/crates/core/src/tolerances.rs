//! Numerical tolerances shared by the library and its tests.
//!
//! Every comparison against one of these thresholds should name the constant
//! rather than repeating the literal.

/// Largest square matrix handled by the dense kernel.
pub const MAX_MATRIX_DIM: usize = 25;

/// Relative accuracy expected from `det` on well-conditioned input.
pub const DET_RELATIVE: f64 = 1e-12;

/// Eigen-residual bound, relative to the Frobenius norm of the matrix.
pub const EIGEN_RESIDUAL: f64 = 1e-8;

/// Conjugate pairing of eigenvalues of real-entried matrices.
pub const CONJUGATE_PAIRING: f64 = 1e-10;

/// Hermiticity, trace and positivity of density and measurement operators.
pub const OPERATOR: f64 = 1e-10;

/// Normalization `sum K K^dag = 1` of a Kraus channel.
pub const KRAUS_NORMALIZATION: f64 = 1e-9;

/// Unitarity check for `make_unitary_channel`.
pub const UNITARITY: f64 = 1e-10;

/// Stochasticity of a classical transition matrix.
pub const STOCHASTIC: f64 = 1e-12;

/// Probabilities outside [0, 1] by at most this much are clamped silently.
pub const CLAMP_SILENT: f64 = 1e-9;

/// Probabilities outside [0, 1] by more than this are rejected outright.
pub const CLAMP_HARD: f64 = 1e-6;

/// Imaginary residual allowed when rebuilding a sequence from modes.
pub const MODE_IMAGINARY: f64 = 1e-10;

/// Moduli closer than this count as a tie when ordering a spectrum.
pub const SPECTRUM_TIE: f64 = 1e-9;

/// Rank-bound nulls: `|det W_N|` for sequences that must satisfy the bound.
pub const RANK_NULL: f64 = 1e-9;

/// Rank-bound null for qutrit channels (`W_9`).
pub const RANK_NULL_QUTRIT: f64 = 1e-8;

/// Exact-arithmetic nulls for ideal unitary sequences.
pub const IDEAL_NULL: f64 = 1e-12;

/// `det W_N = det W~_N` identity.
pub const DET_EQUALITY: f64 = 1e-11;

/// Closed-form variance expressions against the generic delta method.
pub const CLOSED_FORM: f64 = 1e-10;

/// Analytic derivatives against central finite differences (relative).
pub const FINITE_DIFFERENCE: f64 = 1e-6;

/// Step used by central finite differences.
pub const FD_STEP: f64 = 1e-6;

/// Projected-gradient norm at which maxima refinement stops.
pub const PROJECTED_GRADIENT: f64 = 1e-10;

/// Table-of-maxima agreement for N <= 6.
pub const MAXIMA_SMALL: f64 = 1e-6;

/// Table-of-maxima agreement for N = 7..9.
pub const MAXIMA_LARGE: f64 = 1e-4;

/// Re-evaluating a reported maximizer must reproduce its value this closely.
pub const MAXIMA_REEVAL: f64 = 1e-12;
