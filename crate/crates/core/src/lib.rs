//! Dimension witnesses from a single repeated operation.
//!
//! A fixed operation is applied `n = 0, 1, 2, ..` times between a
//! preparation and a measurement, producing a probability sequence `p_n`.
//! Toeplitz determinants of the successive differences vanish once their
//! order reaches the number of independent modes the system can support, so
//! a nonzero value is a null-test violation of the assumed dimension.
//!
//! The crate is organized as:
//!
//! * [`linalg`]: small dense determinant, adjugate and eigenvalue kernel;
//! * [`channels`]: Kraus channels, classical chains and sequence generation;
//! * [`witnesses`]: `W_N`, `F1`, `F2` and their derivatives;
//! * [`statistics`]: shot-noise error propagation and binomial sampling;
//! * [`maxima`]: classical extremes of `W_N` over the unit box;
//! * [`harness`]: simulated experiments, count ingestion and reports.

pub mod channels;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod maxima;
pub mod sequence;
pub mod statistics;
pub mod tolerances;
pub mod validate;
pub mod witnesses;

pub use error::{Error, Result};
pub use sequence::ProbabilitySequence;
pub use witnesses::WitnessKind;
