use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::det::solve;
use super::matrix::{ComplexMatrix, Matrix, Scalar};
use crate::error::{Error, Result};
use crate::tolerances::{MAX_MATRIX_DIM, SPECTRUM_TIE};

/// Eigenvalues ordered by descending modulus, ties broken by ascending phase
/// in (-pi, pi].
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<Complex64>,
}

fn phase(z: Complex64) -> f64 {
    let scale = z.norm().max(1e-300);
    if z.im.abs() <= 1e-12 * scale {
        return if z.re < 0.0 { PI } else { 0.0 };
    }
    let p = z.arg();
    if p <= -PI {
        PI
    } else {
        p
    }
}

fn spectrum_order(a: &Complex64, b: &Complex64) -> Ordering {
    let (ma, mb) = (a.norm(), b.norm());
    if (ma - mb).abs() > SPECTRUM_TIE * ma.max(mb).max(1.0) {
        mb.total_cmp(&ma)
    } else {
        phase(*a).total_cmp(&phase(*b))
    }
}

impl Spectrum {
    pub fn new(mut values: Vec<Complex64>) -> Self {
        values.sort_by(spectrum_order);
        Self { values }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Whether some eigenvalue lies within `tol` of `z`.
    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.values.iter().any(|v| (v - z).norm() <= tol)
    }

    /// Largest distance from any eigenvalue's conjugate to its nearest
    /// partner, pairing greedily.
    pub fn conjugate_pairing_error(&self) -> f64 {
        let mut used = vec![false; self.values.len()];
        let mut worst: f64 = 0.0;
        for i in 0..self.values.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let target = self.values[i].conj();
            if (self.values[i] - target).norm() <= SPECTRUM_TIE {
                continue;
            }
            let best = (0..self.values.len())
                .filter(|&j| !used[j])
                .min_by(|&a, &b| {
                    (self.values[a] - target).norm().total_cmp(&(self.values[b] - target).norm())
                });
            match best {
                Some(j) => {
                    used[j] = true;
                    worst = worst.max((self.values[j] - target).norm());
                }
                None => worst = worst.max(self.values[i].im.abs()),
            }
        }
        worst
    }

    /// Matches each element of `expected` to a distinct eigenvalue and
    /// returns the largest mismatch.
    pub fn distance_to(&self, expected: &[Complex64]) -> f64 {
        if expected.len() != self.values.len() {
            return f64::INFINITY;
        }
        let mut used = vec![false; self.values.len()];
        let mut worst: f64 = 0.0;
        for e in expected {
            let j = (0..self.values.len())
                .filter(|&j| !used[j])
                .min_by(|&a, &b| (self.values[a] - e).norm().total_cmp(&(self.values[b] - e).norm()))
                .expect("lengths match");
            used[j] = true;
            worst = worst.max((self.values[j] - e).norm());
        }
        worst
    }
}

/// Reduces `h` (n x n, row-major) to upper Hessenberg form in place with
/// Householder reflections.
fn hessenberg(h: &mut ComplexMatrix, n: usize) {
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| h[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = h[(k + 1, k)];
        let unit = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -unit * norm;
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // H <- (I - 2 v v*) H
        for j in 0..n {
            let s: Complex64 = v.iter().enumerate().map(|(a, vi)| vi.conj() * h[(k + 1 + a, j)]).sum();
            for (a, vi) in v.iter().enumerate() {
                h[(k + 1 + a, j)] -= 2.0 * vi * s;
            }
        }
        // H <- H (I - 2 v v*)
        for i in 0..n {
            let s: Complex64 = v.iter().enumerate().map(|(a, vi)| h[(i, k + 1 + a)] * vi).sum();
            for (a, vi) in v.iter().enumerate() {
                h[(i, k + 1 + a)] -= 2.0 * s * vi.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let m1 = (a + d) * 0.5 + disc;
    let m2 = (a + d) * 0.5 - disc;
    if (m1 - d).norm() <= (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// All eigenvalues with multiplicity, via Hessenberg reduction and
/// single-shift complex QR iteration.
pub fn eigenvalues<T: Scalar>(m: &Matrix<T>) -> Result<Spectrum> {
    let n = m.dim()?;
    if n > MAX_MATRIX_DIM {
        return Err(Error::Resource(format!(
            "matrix dimension {n} exceeds the supported maximum {MAX_MATRIX_DIM}"
        )));
    }
    let mut h = m.to_complex();
    hessenberg(&mut h, n);

    let mut found: Vec<Complex64> = Vec::with_capacity(n);
    let zero = Complex64::new(0.0, 0.0);
    let max_iter_per_value = 60;
    let mut hi = n as isize - 1;
    let mut iter = 0usize;
    let mut rot: Vec<(Complex64, Complex64)> = Vec::with_capacity(n);

    while hi >= 0 {
        let hi_u = hi as usize;
        if hi_u == 0 {
            found.push(h[(0, 0)]);
            break;
        }
        // locate the start of the unreduced block ending at hi
        let mut lo = hi_u;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut scale = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if scale == 0.0 {
                scale = h.frobenius_norm();
            }
            if sub <= f64::EPSILON * scale {
                h[(lo, lo - 1)] = zero;
                break;
            }
            lo -= 1;
        }
        if lo == hi_u {
            found.push(h[(hi_u, hi_u)]);
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > max_iter_per_value {
            return Err(Error::Numerical {
                message: format!(
                    "QR iteration did not converge after {max_iter_per_value} sweeps at row {hi_u}"
                ),
                partial: found,
            });
        }

        let mu = if iter % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi_u, hi_u)] + Complex64::new(0.75, 0.43) * h[(hi_u, hi_u - 1)].norm()
        } else {
            wilkinson_shift(
                h[(hi_u - 1, hi_u - 1)],
                h[(hi_u - 1, hi_u)],
                h[(hi_u, hi_u - 1)],
                h[(hi_u, hi_u)],
            )
        };

        for i in lo..=hi_u {
            h[(i, i)] -= mu;
        }
        rot.clear();
        for k in lo..hi_u {
            let a = h[(k, k)];
            let b = h[(k + 1, k)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 {
                (Complex64::new(1.0, 0.0), zero)
            } else {
                (a / r, b / r)
            };
            for j in k..=hi_u {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = c.conj() * x + s.conj() * y;
                h[(k + 1, j)] = -s * x + c * y;
            }
            rot.push((c, s));
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = lo + idx;
            for i in lo..=(k + 2).min(hi_u) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s;
                h[(i, k + 1)] = -x * s.conj() + y * c.conj();
            }
        }
        for i in lo..=hi_u {
            h[(i, i)] += mu;
        }
    }
    Ok(Spectrum::new(found))
}

/// Eigenvalue with a unit eigenvector found by inverse iteration.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
}

impl EigenPair {
    /// `||m v - lambda v||`.
    pub fn residual(&self, m: &ComplexMatrix) -> f64 {
        let mv = m.matvec(&self.vector).expect("vector length matches matrix");
        mv.iter()
            .zip(&self.vector)
            .map(|(a, b)| (a - self.value * b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Eigenvalues together with right eigenvectors, in spectrum order.
/// Repeated eigenvalues share whichever vector inverse iteration settles on.
pub fn eigenpairs<T: Scalar>(m: &Matrix<T>) -> Result<Vec<EigenPair>> {
    let spectrum = eigenvalues(m)?;
    let cm = m.to_complex();
    let n = cm.rows();
    let norm = cm.frobenius_norm().max(1.0);
    let mut pairs = Vec::with_capacity(n);
    for &lambda in spectrum.values() {
        let mut v: Vec<Complex64> =
            (0..n).map(|i| Complex64::new(1.0 + 0.1 * i as f64, 0.05 * i as f64)).collect();
        let mut delta = 1e-10 * norm;
        for _ in 0..4 {
            let shifted = Matrix::from_fn(n, n, |i, j| {
                cm[(i, j)] - if i == j { lambda + delta } else { Complex64::new(0.0, 0.0) }
            });
            match solve(&shifted, &v) {
                Ok(x) => {
                    let xn = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                    if xn.is_finite() && xn > 0.0 {
                        v = x.into_iter().map(|z| z / xn).collect();
                    }
                }
                Err(_) => delta *= 10.0,
            }
        }
        pairs.push(EigenPair { value: lambda, vector: v });
    }
    Ok(pairs)
}
