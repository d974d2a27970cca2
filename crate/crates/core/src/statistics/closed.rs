//! Closed-form variances written out term by term. They must agree with the
//! generic gradient/Hessian route in the parent module.

use super::binomial_variance;
use crate::error::{Error, Result};
use crate::linalg::{adjugate, toeplitz_from_differences};
use crate::witnesses::WitnessKind;

fn equal_shots(kind: WitnessKind, p: &[f64], shots: &[u64]) -> Result<(Vec<f64>, f64)> {
    let len = kind.required_length();
    if p.len() < len {
        return Err(Error::Length { required: len, actual: p.len() });
    }
    if shots.len() != p.len() {
        return Err(Error::dim(format!("{} probabilities but {} shot counts", p.len(), shots.len())));
    }
    let n = shots[0];
    if n == 0 {
        return Err(Error::invalid("zero shots"));
    }
    if shots[..len].iter().any(|&s| s != n) {
        return Err(Error::invalid(format!(
            "closed-form {kind} variance assumes equal shots at every index; use delta_variance"
        )));
    }
    Ok((p[..len].iter().map(|&x| binomial_variance(x)).collect(), n as f64))
}

/// `sum_i b_i (sum_j Adj_{j,i-j} - Adj_{j-1,i-j})^2 / N` with out-of-range
/// adjugate entries taken as zero.
pub fn variance_wn_closed(p: &[f64], n: usize, shots: &[u64]) -> Result<f64> {
    let kind = WitnessKind::W(n);
    if n == 0 {
        return Err(Error::invalid("witness order must be positive"));
    }
    let (b, total) = equal_shots(kind, p, shots)?;
    let adj = adjugate(&toeplitz_from_differences(p, n)?)?;
    let at = |r: isize, c: isize| -> f64 {
        if r < 0 || c < 0 || r >= n as isize || c >= n as isize {
            0.0
        } else {
            adj[(r as usize, c as usize)]
        }
    };
    let mut acc = 0.0;
    for (i, bi) in b.iter().enumerate() {
        let i = i as isize;
        let inner: f64 = (0..=n as isize).map(|j| at(j, i - j) - at(j - 1, i - j)).sum();
        acc += bi * inner * inner;
    }
    Ok(acc / total)
}

/// First-order variance of F1 at equal shots.
pub fn variance_f1_closed(p: &[f64], shots: &[u64]) -> Result<f64> {
    let (b, n) = equal_shots(WitnessKind::F1, p, shots)?;
    let s = |x: f64| x * x;
    Ok((b[0] * s(p[3] - p[2])
        + b[1] * s(2.0 * p[1] - p[2] - p[4])
        + b[2] * s(p[0] + p[1] - p[3] - p[4])
        + b[3] * s(2.0 * p[3] - p[2] - p[0])
        + b[4] * s(p[1] - p[2]))
        / n)
}

/// First-order variance of F2 at equal shots.
pub fn variance_f2_closed(p: &[f64], shots: &[u64]) -> Result<f64> {
    let (b, n) = equal_shots(WitnessKind::F2, p, shots)?;
    let s = |x: f64| x * x;
    let a = p[2] - 2.0 * p[3] + p[4];
    let c = p[2] - p[1] + p[4] - p[5];
    Ok(((b[0] + b[6]) * s(a)
        + 4.0 * (b[1] + b[5]) * s(c)
        + (b[2] + b[4]) * s(2.0 * p[2] - 2.0 * p[1] + 2.0 * p[4] - 2.0 * p[5] - p[6] + 2.0 * p[3] - p[0])
        + 4.0 * b[3] * s(p[0] + p[2] + p[4] + p[6] - 4.0 * p[3]))
        / n)
}

/// Second-order variance of F2 at equal shots.
pub fn second_order_f2_closed(p: &[f64], shots: &[u64]) -> Result<f64> {
    let (b, n) = equal_shots(WitnessKind::F2, p, shots)?;
    let s = |x: f64| x * x;
    Ok(((b[0] + 4.0 * b[3] + b[6]) * (b[2] + 4.0 * b[3] + b[4]) + 16.0 * s(b[3]) + 2.0 * s(b[1] + b[2] + b[4] + b[5]))
        / (n * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statistics::{delta_variance, second_order_variance};
    use proptest::prelude::*;

    fn rel_close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-10 * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn unequal_shots_rejected() {
        let p = [0.5; 7];
        let shots = [10, 10, 10, 11, 10, 10, 10];
        assert!(variance_f2_closed(&p, &shots).is_err());
        assert!(variance_wn_closed(&p[..6], 3, &shots[..6]).is_err());
    }

    #[test]
    fn f2_second_order_at_half() {
        // all b_j = 1/4: (3/2)(3/2) + 1 + 2 = 5.25, over N^2
        let v = second_order_f2_closed(&[0.5; 7], &[100; 7]).unwrap();
        assert!((v - 5.25 / 1e4).abs() < 1e-18);
    }

    proptest! {
        #[test]
        fn closed_forms_match_generic(p in proptest::collection::vec(0.0f64..1.0, 12), n in 10u64..1_000_000) {
            let shots = vec![n; 12];
            for order in 1..=6 {
                let closed = variance_wn_closed(&p, order, &shots).unwrap();
                let generic = delta_variance(WitnessKind::W(order), &p, &shots).unwrap();
                prop_assert!(rel_close(closed, generic), "W{}: {} vs {}", order, closed, generic);
            }
            let f1 = variance_f1_closed(&p, &shots).unwrap();
            prop_assert!(rel_close(f1, delta_variance(WitnessKind::F1, &p, &shots).unwrap()));
            let f2 = variance_f2_closed(&p, &shots).unwrap();
            prop_assert!(rel_close(f2, delta_variance(WitnessKind::F2, &p, &shots).unwrap()));
            let s2 = second_order_f2_closed(&p, &shots).unwrap();
            prop_assert!(rel_close(s2, second_order_variance(WitnessKind::F2, &p, &shots).unwrap()));
        }
    }
}
