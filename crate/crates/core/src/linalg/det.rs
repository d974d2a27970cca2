use super::matrix::{Matrix, Scalar};
use crate::error::{Error, Result};
use crate::tolerances::MAX_MATRIX_DIM;

fn check_size<T: Scalar>(m: &Matrix<T>) -> Result<usize> {
    let n = m.dim()?;
    if n > MAX_MATRIX_DIM {
        return Err(Error::Resource(format!(
            "matrix dimension {n} exceeds the supported maximum {MAX_MATRIX_DIM}"
        )));
    }
    Ok(n)
}

/// Determinant. Sizes up to 4 use an explicit cofactor expansion so the
/// common witness sizes are evaluated with a fixed operation order; larger
/// matrices use partially pivoted elimination.
pub fn det<T: Scalar>(m: &Matrix<T>) -> Result<T> {
    let n = check_size(m)?;
    Ok(det_unchecked(m, n))
}

pub(crate) fn det_unchecked<T: Scalar>(m: &Matrix<T>, n: usize) -> T {
    let a = |i: usize, j: usize| m[(i, j)];
    match n {
        0 => T::one(),
        1 => a(0, 0),
        2 => a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0),
        3 => {
            a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
                - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
        }
        4 => {
            // 2x2 minors of the bottom two rows, indexed by column pair.
            let s = |c0: usize, c1: usize| a(2, c0) * a(3, c1) - a(2, c1) * a(3, c0);
            let (s01, s02, s03) = (s(0, 1), s(0, 2), s(0, 3));
            let (s12, s13, s23) = (s(1, 2), s(1, 3), s(2, 3));
            let c0 = a(1, 1) * s23 - a(1, 2) * s13 + a(1, 3) * s12;
            let c1 = a(1, 0) * s23 - a(1, 2) * s03 + a(1, 3) * s02;
            let c2 = a(1, 0) * s13 - a(1, 1) * s03 + a(1, 3) * s01;
            let c3 = a(1, 0) * s12 - a(1, 1) * s02 + a(1, 2) * s01;
            a(0, 0) * c0 - a(0, 1) * c1 + a(0, 2) * c2 - a(0, 3) * c3
        }
        _ => det_elimination(m, n),
    }
}

fn det_elimination<T: Scalar>(m: &Matrix<T>, n: usize) -> T {
    let mut a: Vec<T> = m.as_slice().to_vec();
    let mut result = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r * n + col].modulus().total_cmp(&a[s * n + col].modulus()))
            .unwrap_or(col);
        if a[pivot * n + col].modulus() == 0.0 {
            return T::zero();
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            result = -result;
        }
        let p = a[col * n + col];
        result *= p;
        for r in col + 1..n {
            let factor = a[r * n + col] / p;
            if factor == T::zero() {
                continue;
            }
            for j in col + 1..n {
                let v = a[col * n + j];
                a[r * n + j] -= factor * v;
            }
        }
    }
    result
}

/// Transposed cofactor matrix. Built from minors, so it is well defined for
/// singular input where `det * inverse` is not.
pub fn adjugate<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let n = check_size(m)?;
    if n == 1 {
        return Ok(Matrix::identity(1));
    }
    let mut adj = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let minor = m.without(&[i], &[j]);
            let c = det_unchecked(&minor, n - 1);
            adj[(j, i)] = if (i + j) % 2 == 0 { c } else { -c };
        }
    }
    Ok(adj)
}

/// Solves `a x = b` by partially pivoted LU. Fails on exactly singular
/// systems.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.dim()?;
    if b.len() != n {
        return Err(Error::dim(format!("right-hand side has length {}, expected {n}", b.len())));
    }
    let mut m: Vec<T> = a.as_slice().to_vec();
    let mut x: Vec<T> = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| m[r * n + col].modulus().total_cmp(&m[s * n + col].modulus()))
            .unwrap_or(col);
        if m[pivot * n + col].modulus() == 0.0 {
            return Err(Error::Numerical {
                message: format!("singular system at column {col}"),
                partial: Vec::new(),
            });
        }
        if pivot != col {
            for j in 0..n {
                m.swap(col * n + j, pivot * n + j);
            }
            x.swap(col, pivot);
        }
        let p = m[col * n + col];
        for r in col + 1..n {
            let factor = m[r * n + col] / p;
            if factor == T::zero() {
                continue;
            }
            for j in col..n {
                let v = m[col * n + j];
                m[r * n + j] -= factor * v;
            }
            let v = x[col];
            x[r] -= factor * v;
        }
    }
    for row in (0..n).rev() {
        let mut acc = x[row];
        for j in row + 1..n {
            acc -= m[row * n + j] * x[j];
        }
        x[row] = acc / m[row * n + row];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::RealMatrix;
    use crate::tolerances::DET_RELATIVE;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Laplace expansion along the first row, for any size.
    fn laplace(m: &RealMatrix) -> f64 {
        let n = m.rows();
        if n == 1 {
            return m[(0, 0)];
        }
        (0..n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * m[(0, j)] * laplace(&m.without(&[0], &[j]))
            })
            .sum()
    }

    fn random(n: usize, rng: &mut impl Rng) -> RealMatrix {
        RealMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn identity_determinant() {
        assert_eq!(det(&RealMatrix::identity(3)).unwrap(), 1.0);
        assert_eq!(det(&RealMatrix::identity(7)).unwrap(), 1.0);
    }

    #[test]
    fn non_square_is_dimension_error() {
        let m = RealMatrix::zeros(2, 3);
        assert!(matches!(det(&m), Err(Error::Dimension(_))));
        assert!(matches!(adjugate(&m), Err(Error::Dimension(_))));
    }

    #[test]
    fn oversized_is_rejected() {
        let m = RealMatrix::identity(MAX_MATRIX_DIM + 1);
        assert!(matches!(det(&m), Err(Error::Resource(_))));
    }

    #[test]
    fn elimination_matches_laplace_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=7 {
            for _ in 0..20 {
                let m = random(n, &mut rng);
                let expected = laplace(&m);
                let got = det(&m).unwrap();
                assert!(
                    (got - expected).abs() <= 1e-10 * expected.abs().max(1e-3),
                    "n={n}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn adjugate_closed_forms() {
        let m = RealMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let adj = adjugate(&m).unwrap();
        assert_eq!(adj.as_slice(), &[4.0, -2.0, -3.0, 1.0]);
        for n in 1..6 {
            assert_eq!(adjugate(&RealMatrix::identity(n)).unwrap(), RealMatrix::identity(n));
        }
    }

    #[test]
    fn adjugate_of_rank_deficient_matrix() {
        // rank n-1: adjugate is nonzero even though det = 0
        let m = RealMatrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![0.0, 1.0, 1.0]])
            .unwrap();
        assert_eq!(det(&m).unwrap(), 0.0);
        let adj = adjugate(&m).unwrap();
        assert!(adj.max_abs() > 0.5);
        assert!(m.matmul(&adj).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn complex_determinant() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let m = Matrix::from_rows(&[vec![one, -i], vec![-i, one]]).unwrap();
        let d = det(&m).unwrap();
        assert!((d - Complex64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn solve_recovers_solution() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random(6, &mut rng);
        let x: Vec<f64> = (0..6).map(|i| i as f64 - 2.5).collect();
        let b = a.matvec(&x).unwrap();
        let got = solve(&a, &b).unwrap();
        for (g, e) in got.iter().zip(&x) {
            assert!((g - e).abs() < 1e-9);
        }
        assert!(solve(&RealMatrix::zeros(2, 2), &[1.0, 1.0]).is_err());
    }

    proptest! {
        #[test]
        fn determinant_is_multiplicative(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random(4, &mut rng);
            let b = random(4, &mut rng);
            let lhs = det(&a.matmul(&b).unwrap()).unwrap();
            let rhs = det(&a).unwrap() * det(&b).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1e-2));
        }

        #[test]
        fn adjugate_identity(seed in any::<u64>(), n in 2usize..=8) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random(n, &mut rng);
            let d = det(&m).unwrap();
            let prod = m.matmul(&adjugate(&m).unwrap()).unwrap();
            let err = prod.max_abs_diff(&RealMatrix::identity(n).scale(d));
            prop_assert!(err < 1e-10, "err {err}");
        }

        #[test]
        fn small_sizes_agree_with_elimination(seed in any::<u64>(), n in 1usize..=4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random(n, &mut rng);
            let a = det(&m).unwrap();
            let b = det_elimination(&m, n);
            prop_assert!((a - b).abs() <= DET_RELATIVE * 10.0 * b.abs().max(1.0));
        }
    }
}
