use super::WitnessKind;
use crate::error::Result;
use crate::linalg::{adjugate, det_unchecked, toeplitz_from_differences, RealMatrix};

/// Analytic gradient with respect to `p_0 .. p_{L-1}` where `L` is the
/// kind's required length.
///
/// For `W(N)`, `d det / d W_jk = adj(W)_kj` and `W_jk` depends on
/// `p_{j+k}` (+1) and `p_{j+k+1}` (-1).
pub fn witness_gradient(kind: WitnessKind, p: &[f64]) -> Result<Vec<f64>> {
    kind.check(p)?;
    let p = &p[..kind.required_length()];
    Ok(match kind {
        WitnessKind::W(n) => {
            let w = toeplitz_from_differences(p, n)?;
            let adj = adjugate(&w)?;
            let mut g = vec![0.0; 2 * n];
            for j in 0..n {
                for k in 0..n {
                    let d = adj[(k, j)];
                    g[j + k] += d;
                    g[j + k + 1] -= d;
                }
            }
            g
        }
        WitnessKind::F1 => vec![
            p[3] - p[2],
            2.0 * p[1] - p[2] - p[4],
            -p[0] - p[1] + p[3] + p[4],
            p[0] + p[2] - 2.0 * p[3],
            p[2] - p[1],
        ],
        WitnessKind::F2 => {
            let (a, b, c) = f2_parts(p);
            let mut g = vec![0.0; 7];
            for i in 0..7 {
                g[i] = b * F2_GRAD_A[i] + a * F2_GRAD_B[i] - 2.0 * c * F2_GRAD_C[i];
            }
            g
        }
    })
}

const F2_GRAD_A: [f64; 7] = [0.0, 0.0, 1.0, -2.0, 1.0, 0.0, 0.0];
const F2_GRAD_B: [f64; 7] = [1.0, 0.0, 0.0, -2.0, 0.0, 0.0, 1.0];
const F2_GRAD_C: [f64; 7] = [0.0, -1.0, 1.0, 0.0, 1.0, -1.0, 0.0];

fn f2_parts(p: &[f64]) -> (f64, f64, f64) {
    (
        p[2] - 2.0 * p[3] + p[4],
        p[6] - 2.0 * p[3] + p[0],
        p[2] - p[1] + p[4] - p[5],
    )
}

/// Analytic Hessian with respect to `p_0 .. p_{L-1}`.
///
/// For `W(N)` the second derivative of the determinant with respect to
/// entries `(a, b)` and `(c, e)` is the signed minor with rows `a, c` and
/// columns `b, e` removed (zero when they share a row or a column). F1 and
/// F2 are quadratic, so their Hessians are constant.
pub fn witness_hessian(kind: WitnessKind, p: &[f64]) -> Result<RealMatrix> {
    kind.check(p)?;
    Ok(match kind {
        WitnessKind::W(n) => det_hessian(&toeplitz_from_differences(p, n)?, n),
        WitnessKind::F1 => {
            let mut h = RealMatrix::zeros(5, 5);
            let mut set = |i: usize, j: usize, v: f64| {
                h[(i, j)] = v;
                h[(j, i)] = v;
            };
            set(1, 1, 2.0);
            set(3, 3, -2.0);
            set(0, 3, 1.0);
            set(0, 2, -1.0);
            set(1, 2, -1.0);
            set(2, 3, 1.0);
            set(2, 4, 1.0);
            set(1, 4, -1.0);
            h
        }
        WitnessKind::F2 => RealMatrix::from_fn(7, 7, |i, j| {
            F2_GRAD_A[i] * F2_GRAD_B[j] + F2_GRAD_B[i] * F2_GRAD_A[j] - 2.0 * F2_GRAD_C[i] * F2_GRAD_C[j]
        }),
    })
}

fn det_hessian(w: &RealMatrix, n: usize) -> RealMatrix {
    let len = 2 * n;
    let mut h = RealMatrix::zeros(len, len);
    if n < 2 {
        return h;
    }
    let entries: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    for (x, &(a, b)) in entries.iter().enumerate() {
        for &(c, e) in &entries[x + 1..] {
            if a == c || b == e {
                continue;
            }
            let rows = if a < c { [a, c] } else { [c, a] };
            let cols = if b < e { [b, e] } else { [e, b] };
            let minor = w.without(&rows, &cols);
            let c_shift = c - usize::from(c > a);
            let e_shift = e - usize::from(e > b);
            let sign = if (a + b + c_shift + e_shift) % 2 == 0 { 1.0 } else { -1.0 };
            let d2 = sign * det_unchecked(&minor, n - 2);
            // entry (a,b) feeds p_{a+b} with +1 and p_{a+b+1} with -1
            for (i, si) in [(a + b, 1.0), (a + b + 1, -1.0)] {
                for (j, sj) in [(c + e, 1.0), (c + e + 1, -1.0)] {
                    let v = si * sj * d2;
                    h[(i, j)] += v;
                    h[(j, i)] += v;
                }
            }
        }
    }
    h
}
