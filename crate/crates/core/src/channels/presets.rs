use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::kraus::KrausChannel;
use super::operators::{DensityMatrix, MeasurementOperator};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::tolerances::UNITARITY;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn check_rate(name: &str, rate: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::invalid(format!("{name} rate {rate} outside [0, 1]")));
    }
    Ok(())
}

/// Single-Kraus channel `M -> U M U^dag`.
pub fn make_unitary_channel(u: &ComplexMatrix) -> Result<KrausChannel> {
    let d = u.dim()?;
    let err = u.matmul(&u.adjoint())?.max_abs_diff(&ComplexMatrix::identity(d));
    if err > UNITARITY {
        return Err(Error::invalid(format!("matrix is not unitary (deviation {err:.3e})")));
    }
    KrausChannel::new(vec![u.clone()])
}

/// Rotation by `theta` about the x axis of the Bloch sphere.
pub fn rx(theta: f64) -> ComplexMatrix {
    let (s, co) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_rows(&[vec![c(co, 0.0), c(0.0, -s)], vec![c(0.0, -s), c(co, 0.0)]])
        .expect("2x2")
}

/// The sqrt(X) gate `(1/sqrt 2) [[1, -i], [-i, 1]]`.
pub fn sqrt_x() -> ComplexMatrix {
    rx(std::f64::consts::FRAC_PI_2)
}

pub fn sqrt_x_channel() -> KrausChannel {
    KrausChannel::new(vec![sqrt_x()]).expect("sqrt(X) is unitary")
}

/// Qubit relaxation `|1> -> |0>` with probability `gamma` per step.
pub fn make_amplitude_damping(gamma: f64) -> Result<KrausChannel> {
    check_rate("amplitude damping", gamma)?;
    let k0 = ComplexMatrix::diagonal(&[c(1.0, 0.0), c((1.0 - gamma).sqrt(), 0.0)]);
    let k1 = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(gamma.sqrt(), 0.0), c(0.0, 0.0)]])?;
    KrausChannel::new(if gamma > 0.0 { vec![k0, k1] } else { vec![k0] })
}

/// Qubit dephasing: coherences shrink by `sqrt(1 - lambda)` per step.
pub fn make_phase_damping(lambda: f64) -> Result<KrausChannel> {
    check_rate("phase damping", lambda)?;
    let k0 = ComplexMatrix::diagonal(&[c(1.0, 0.0), c((1.0 - lambda).sqrt(), 0.0)]);
    let k1 = ComplexMatrix::diagonal(&[c(0.0, 0.0), c(lambda.sqrt(), 0.0)]);
    KrausChannel::new(if lambda > 0.0 { vec![k0, k1] } else { vec![k0] })
}

/// Qubit depolarization: `M -> (1 - q) M + q Tr[M] / 2`.
pub fn make_depolarizing(q: f64) -> Result<KrausChannel> {
    check_rate("depolarizing", q)?;
    let id = ComplexMatrix::identity(2).scale(c((1.0 - 0.75 * q).sqrt(), 0.0));
    if q == 0.0 {
        return KrausChannel::new(vec![id]);
    }
    let w = c((q / 4.0).sqrt(), 0.0);
    let x = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), w], vec![w, c(0.0, 0.0)]])?;
    let y = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), -w * c(0.0, 1.0)], vec![w * c(0.0, 1.0), c(0.0, 0.0)]])?;
    let z = ComplexMatrix::diagonal(&[w, -w]);
    KrausChannel::new(vec![id, x, y, z])
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Orthonormalizes the columns of a tall matrix by modified Gram-Schmidt.
fn orthonormal_columns(mut cols: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    for j in 0..cols.len() {
        for i in 0..j {
            let proj: Complex64 = cols[i].iter().zip(&cols[j]).map(|(a, b)| a.conj() * b).sum();
            let ci = cols[i].clone();
            for (x, y) in cols[j].iter_mut().zip(&ci) {
                *x -= proj * y;
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut cols[j] {
            *x /= norm;
        }
    }
    cols
}

fn random_channel_impl(d: usize, kraus_count: usize, real: bool, rng: &mut impl Rng) -> KrausChannel {
    let rows = d * kraus_count;
    let cols: Vec<Vec<Complex64>> = (0..d)
        .map(|_| {
            (0..rows)
                .map(|_| if real { c(gaussian(rng), 0.0) } else { c(gaussian(rng), gaussian(rng)) })
                .collect()
        })
        .collect();
    let v = orthonormal_columns(cols);
    // Blocks V_j of the isometry satisfy sum V_j^dag V_j = 1, so K_j = V_j^dag
    // is normalized in the Heisenberg convention.
    let ops = (0..kraus_count)
        .map(|j| ComplexMatrix::from_fn(d, d, |a, b| v[a][j * d + b].conj()))
        .collect();
    KrausChannel::new(ops).expect("isometry blocks are normalized")
}

/// Random channel with `kraus_count` Kraus operators drawn from a
/// Haar-like isometry.
pub fn random_channel(d: usize, kraus_count: usize, rng: &mut impl Rng) -> KrausChannel {
    random_channel_impl(d, kraus_count, false, rng)
}

/// Random channel whose Kraus operators have real entries.
pub fn random_real_channel(d: usize, kraus_count: usize, rng: &mut impl Rng) -> KrausChannel {
    random_channel_impl(d, kraus_count, true, rng)
}

/// Random unitary from the Gram-Schmidt of a Ginibre matrix.
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let cols: Vec<Vec<Complex64>> =
        (0..d).map(|_| (0..d).map(|_| c(gaussian(rng), gaussian(rng))).collect()).collect();
    let q = orthonormal_columns(cols);
    ComplexMatrix::from_fn(d, d, |i, j| q[j][i])
}

fn random_psd(d: usize, real: bool, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(d, d, |_, _| {
        if real {
            c(gaussian(rng), 0.0)
        } else {
            c(gaussian(rng), gaussian(rng))
        }
    });
    let gg = g.matmul(&g.adjoint()).expect("square");
    let tr = gg.trace().re;
    let mut m = gg.scale(c(1.0 / tr, 0.0));
    // symmetrize away roundoff
    m = m.try_add(&m.adjoint()).expect("square").scale(c(0.5, 0.0));
    m
}

/// Random full-rank state.
pub fn random_density(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    DensityMatrix::new(random_psd(d, false, rng)).expect("valid by construction")
}

/// Random state with real entries.
pub fn random_real_density(d: usize, rng: &mut impl Rng) -> DensityMatrix {
    DensityMatrix::new(random_psd(d, true, rng)).expect("valid by construction")
}

/// Random effect with spectrum in [0, 1] (a trace-normalized positive
/// matrix).
pub fn random_measurement(d: usize, rng: &mut impl Rng) -> MeasurementOperator {
    MeasurementOperator::new(random_psd(d, false, rng)).expect("valid by construction")
}

pub fn random_real_measurement(d: usize, rng: &mut impl Rng) -> MeasurementOperator {
    MeasurementOperator::new(random_psd(d, true, rng)).expect("valid by construction")
}
