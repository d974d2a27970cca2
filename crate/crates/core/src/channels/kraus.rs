use num_complex::Complex64;

use super::operators::{DensityMatrix, MeasurementOperator};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, RealMatrix};
use crate::sequence::ProbabilitySequence;
use crate::tolerances::KRAUS_NORMALIZATION;

/// Completely positive map in the Heisenberg picture,
/// `M -> sum_j K_j M K_j^dag`, normalized by `sum_j K_j K_j^dag = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    dim: usize,
    ops: Vec<ComplexMatrix>,
    relaxed: bool,
}

fn check_ops(ops: &[ComplexMatrix]) -> Result<usize> {
    let first = ops.first().ok_or_else(|| Error::invalid("a channel needs at least one Kraus operator"))?;
    let d = first.dim()?;
    if let Some(i) = ops.iter().position(|k| k.rows() != d || k.cols() != d) {
        return Err(Error::dim(format!("Kraus operator {i} is not {d}x{d}")));
    }
    Ok(d)
}

fn gram(ops: &[ComplexMatrix], d: usize) -> ComplexMatrix {
    ops.iter().fold(ComplexMatrix::zeros(d, d), |acc, k| {
        acc.try_add(&k.matmul(&k.adjoint()).expect("square")).expect("same shape")
    })
}

impl KrausChannel {
    /// Normalized channel; fails unless `sum K K^dag = 1` within
    /// `KRAUS_NORMALIZATION`.
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let d = check_ops(&ops)?;
        let err = gram(&ops, d).max_abs_diff(&ComplexMatrix::identity(d));
        if err > KRAUS_NORMALIZATION {
            return Err(Error::invalid(format!(
                "Kraus operators are not normalized (max deviation {err:.3e})"
            )));
        }
        Ok(Self { dim: d, ops, relaxed: false })
    }

    /// Channel that skips the normalization check. Flagged as relaxed so
    /// downstream code can tell it apart.
    pub fn new_relaxed(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let d = check_ops(&ops)?;
        Ok(Self { dim: d, ops, relaxed: true })
    }

    pub fn identity(d: usize) -> Self {
        Self { dim: d, ops: vec![ComplexMatrix::identity(d)], relaxed: false }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn is_relaxed(&self) -> bool {
        self.relaxed
    }

    /// Largest entry of `sum K K^dag - 1`.
    pub fn normalization_error(&self) -> f64 {
        gram(&self.ops, self.dim).max_abs_diff(&ComplexMatrix::identity(self.dim))
    }

    /// Whether every Kraus operator has real entries.
    pub fn is_real(&self) -> bool {
        self.ops.iter().all(|k| k.max_imag() == 0.0)
    }

    pub(crate) fn apply_matrix(&self, m: &ComplexMatrix) -> ComplexMatrix {
        self.ops.iter().fold(ComplexMatrix::zeros(self.dim, self.dim), |acc, k| {
            let km = k.matmul(m).expect("dims checked");
            acc.try_add(&km.matmul(&k.adjoint()).expect("dims checked")).expect("dims checked")
        })
    }

    /// `sum_j K_j M K_j^dag`.
    pub fn apply_heisenberg(&self, m: &MeasurementOperator) -> Result<MeasurementOperator> {
        if m.dim() != self.dim {
            return Err(Error::dim(format!(
                "measurement of dimension {} does not match channel dimension {}",
                m.dim(),
                self.dim
            )));
        }
        Ok(MeasurementOperator::from_evolved(self.apply_matrix(m.matrix())))
    }

    /// Sequential composition: one step of the result is one step of
    /// `self` followed by one step of `next`. In the Heisenberg picture
    /// `next` acts on the measurement first.
    pub fn then(&self, next: &KrausChannel) -> Result<KrausChannel> {
        if next.dim != self.dim {
            return Err(Error::dim(format!("cannot compose dimensions {} and {}", self.dim, next.dim)));
        }
        let ops = self
            .ops
            .iter()
            .flat_map(|a| next.ops.iter().map(move |b| a.matmul(b).expect("dims checked")))
            .filter(|k| k.max_abs() > 0.0)
            .collect::<Vec<_>>();
        let ops = if ops.is_empty() { vec![ComplexMatrix::zeros(self.dim, self.dim)] } else { ops };
        Ok(KrausChannel { dim: self.dim, ops, relaxed: self.relaxed || next.relaxed })
    }

    /// `Tr[P R^n(M)]` for `n = 0 .. len-1`, without clamping.
    pub fn raw_sequence(
        &self,
        state: &DensityMatrix,
        measurement: &MeasurementOperator,
        len: usize,
    ) -> Result<Vec<f64>> {
        if state.dim() != self.dim || measurement.dim() != self.dim {
            return Err(Error::dim(format!(
                "state ({}), channel ({}) and measurement ({}) dimensions differ",
                state.dim(),
                self.dim,
                measurement.dim()
            )));
        }
        let p = state.matrix();
        let mut evolved = measurement.matrix().clone();
        let mut out = Vec::with_capacity(len);
        for n in 0..len {
            let value = trace_product(p, &evolved);
            if value.im.abs() > 1e-9 {
                return Err(Error::Numerical {
                    message: format!("p_{n} has imaginary part {:.3e}", value.im),
                    partial: Vec::new(),
                });
            }
            out.push(value.re);
            if n + 1 < len {
                evolved = self.apply_matrix(&evolved);
            }
        }
        Ok(out)
    }

    /// Outcome probabilities after `n = 0 .. len-1` applications, clamped
    /// into [0, 1].
    pub fn probability_sequence(
        &self,
        state: &DensityMatrix,
        measurement: &MeasurementOperator,
        len: usize,
    ) -> Result<ProbabilitySequence> {
        if len == 0 {
            return Err(Error::invalid("sequence length must be at least 1"));
        }
        ProbabilitySequence::clamped(self.raw_sequence(state, measurement, len)?)
    }

    /// `d^2 x d^2` matrix of the Heisenberg action in the chosen operator
    /// basis. In the matrix-unit basis, row `(a, b)` and column `(c, e)`
    /// (lexicographic) hold `[R(E_ce)]_ab = sum_j K_j[a,c] conj(K_j[b,e])`.
    pub fn superoperator(&self, basis: OperatorBasis) -> ComplexMatrix {
        match basis {
            OperatorBasis::MatrixUnits => self
                .ops
                .iter()
                .fold(ComplexMatrix::zeros(self.dim * self.dim, self.dim * self.dim), |acc, k| {
                    acc.try_add(&k.kron(&k.map(|z| z.conj()))).expect("same shape")
                }),
            OperatorBasis::GellMann => {
                let basis = gell_mann_basis(self.dim);
                let images: Vec<ComplexMatrix> = basis.iter().map(|g| self.apply_matrix(g)).collect();
                let n = basis.len();
                ComplexMatrix::from_fn(n, n, |i, j| trace_product(&basis[i], &images[j]))
            }
        }
    }

    /// Matrix-unit superoperator.
    pub fn superoperator_matrix(&self) -> ComplexMatrix {
        self.superoperator(OperatorBasis::MatrixUnits)
    }

    /// Real superoperator in the Gell-Mann basis; Hermiticity preservation
    /// makes every entry real.
    pub fn superoperator_real(&self) -> RealMatrix {
        self.superoperator(OperatorBasis::GellMann).real_part()
    }
}

/// `Tr[a b]`.
pub(crate) fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    let n = a.rows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Operator basis used for superoperator matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorBasis {
    /// `E_ab = |a><b|`, ordered lexicographically in `(a, b)`.
    MatrixUnits,
    /// Orthonormal Hermitian basis: `1/sqrt(d)`, then the diagonal
    /// generalized Gell-Mann matrices, then symmetric off-diagonal pairs
    /// `(j, k)`, then antisymmetric pairs, each group in lexicographic
    /// order and normalized to `Tr[G_i G_j] = delta_ij`. The first
    /// `d(d+1)/2` elements span the real symmetric operators.
    GellMann,
}

/// Orthonormal generalized Gell-Mann basis, ordered as documented on
/// [`OperatorBasis::GellMann`].
pub fn gell_mann_basis(d: usize) -> Vec<ComplexMatrix> {
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut out = Vec::with_capacity(d * d);
    out.push(ComplexMatrix::identity(d).scale(c(1.0 / (d as f64).sqrt())));
    for l in 1..d {
        let norm = ((l * (l + 1)) as f64).sqrt();
        out.push(ComplexMatrix::from_fn(d, d, |i, j| {
            if i != j {
                c(0.0)
            } else if i < l {
                c(1.0 / norm)
            } else if i == l {
                c(-(l as f64) / norm)
            } else {
                c(0.0)
            }
        }));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in j + 1..d {
            out.push(ComplexMatrix::from_fn(d, d, |a, b| {
                if (a, b) == (j, k) || (a, b) == (k, j) {
                    c(s)
                } else {
                    c(0.0)
                }
            }));
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            out.push(ComplexMatrix::from_fn(d, d, |a, b| {
                if (a, b) == (j, k) {
                    Complex64::new(0.0, -s)
                } else if (a, b) == (k, j) {
                    Complex64::new(0.0, s)
                } else {
                    c(0.0)
                }
            }));
        }
    }
    out
}

/// Extends `channel` by an absorbing classical level. Each step, population
/// of the original levels leaks into the sink with probability `leak_rate`;
/// the sink never returns. The result acts on dimension `d + 1`.
pub fn add_sink_state(channel: &KrausChannel, leak_rate: f64) -> Result<KrausChannel> {
    if !(0.0..1.0).contains(&leak_rate) {
        return Err(Error::invalid(format!("leak rate {leak_rate} outside [0, 1)")));
    }
    let d = channel.dim;
    let d1 = d + 1;
    let keep = Complex64::new((1.0 - leak_rate).sqrt(), 0.0);
    let mut ops: Vec<ComplexMatrix> = channel
        .ops
        .iter()
        .map(|k| k.scale(keep).direct_sum(&ComplexMatrix::zeros(1, 1)))
        .collect();
    if leak_rate > 0.0 {
        let amp = Complex64::new(leak_rate.sqrt(), 0.0);
        for a in 0..d {
            // Heisenberg form of the jump |sink><a|
            ops.push(ComplexMatrix::from_fn(d1, d1, |i, j| {
                if i == a && j == d {
                    amp
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }));
        }
    }
    ops.push(ComplexMatrix::from_fn(d1, d1, |i, j| {
        if i == d && j == d {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }));
    if channel.relaxed {
        KrausChannel::new_relaxed(ops)
    } else {
        KrausChannel::new(ops)
    }
}
