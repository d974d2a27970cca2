//! Quantum channels in Kraus form, classical Markov chains, their
//! superoperators, and the probability sequences `p_n = Tr[P R^n(M)]`.

mod classical;
mod kraus;
mod modes;
mod operators;
mod presets;
mod spec;

pub use classical::{classical_sequence, ClassicalChain};
pub use kraus::{add_sink_state, gell_mann_basis, KrausChannel, OperatorBasis};
pub(crate) use kraus::trace_product;
pub use modes::{damped_rotation_modes, sequence_from_modes, Mode, ModeExpansion};
pub use operators::{basis_projector, DensityMatrix, MeasurementOperator};
pub use presets::{
    make_amplitude_damping, make_depolarizing, make_phase_damping, make_unitary_channel,
    random_channel, random_density, random_measurement, random_real_channel, random_real_density,
    random_real_measurement, random_unitary, rx, sqrt_x, sqrt_x_channel,
};
pub use spec::{parse_channel, ChannelSpec};

use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::sequence::ProbabilitySequence;

/// `sum_j K_j M K_j^dag`.
pub fn apply_heisenberg(channel: &KrausChannel, m: &MeasurementOperator) -> Result<MeasurementOperator> {
    channel.apply_heisenberg(m)
}

/// `p_n = Tr[P R^n(M)]` for `n = 0 .. len-1`, clamped into [0, 1].
pub fn probability_sequence(
    state: &DensityMatrix,
    channel: &KrausChannel,
    m: &MeasurementOperator,
    len: usize,
) -> Result<ProbabilitySequence> {
    channel.probability_sequence(state, m, len)
}

/// Matrix-unit superoperator of the Heisenberg action.
pub fn superoperator_matrix(channel: &KrausChannel) -> ComplexMatrix {
    channel.superoperator_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigenvalues, RealMatrix};
    use crate::tolerances::{KRAUS_NORMALIZATION, OPERATOR};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_channel_leaves_measurement() {
        let m = random_measurement(3, &mut ChaCha8Rng::seed_from_u64(1));
        let out = apply_heisenberg(&KrausChannel::identity(3), &m).unwrap();
        assert!(out.matrix().max_abs_diff(m.matrix()) < 1e-15);
    }

    #[test]
    fn sqrt_x_on_excited_projector() {
        let m = MeasurementOperator::basis(2, 1).unwrap();
        let out = apply_heisenberg(&sqrt_x_channel(), &m).unwrap();
        // oracle: v = S|1> = (-i, 1)/sqrt2, out = v v^dag
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = [c(0.0, -s), c(s, 0.0)];
        let expected = ComplexMatrix::from_fn(2, 2, |i, j| v[i] * v[j].conj());
        assert!(out.matrix().max_abs_diff(&expected) < 1e-15);
        let literal = ComplexMatrix::from_rows(&[vec![c(0.5, 0.0), c(0.0, -0.5)], vec![c(0.0, 0.5), c(0.5, 0.0)]])
            .unwrap();
        assert!(out.matrix().max_abs_diff(&literal) < 1e-15);
    }

    #[test]
    fn normalized_channels_fix_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for d in 1..=4 {
            let ch = random_channel(d, 3, &mut rng);
            let out = apply_heisenberg(&ch, &MeasurementOperator::identity(d)).unwrap();
            assert!(out.matrix().max_abs_diff(&ComplexMatrix::identity(d)) < KRAUS_NORMALIZATION);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let m = MeasurementOperator::identity(3);
        assert!(apply_heisenberg(&sqrt_x_channel(), &m).is_err());
        let p = DensityMatrix::basis(2, 0).unwrap();
        assert!(probability_sequence(&p, &sqrt_x_channel(), &m, 4).is_err());
    }

    #[test]
    fn sqrt_x_sequence() {
        let p = DensityMatrix::basis(2, 1).unwrap();
        let m = MeasurementOperator::basis(2, 1).unwrap();
        let seq = probability_sequence(&p, &sqrt_x_channel(), &m, 8).unwrap();
        for (n, &v) in seq.iter().enumerate() {
            let oracle = (n as f64 * std::f64::consts::FRAC_PI_4).cos().powi(2);
            assert!((v - oracle).abs() < 1e-15, "n={n}: {v} vs {oracle}");
        }
        // period 4
        for n in 0..4 {
            assert!((seq[n] - seq[n + 4]).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_channel_sequence_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_density(2, &mut rng);
        let m = random_measurement(2, &mut rng);
        let expected = (p.matrix().matmul(m.matrix()).unwrap().trace()).re;
        let seq = probability_sequence(&p, &KrausChannel::identity(2), &m, 6).unwrap();
        assert!(seq.iter().all(|&x| (x - expected).abs() < 1e-15));
    }

    #[test]
    fn amplitude_damping_decays_geometrically() {
        let gamma = 0.1;
        let p = DensityMatrix::basis(2, 1).unwrap();
        let m = MeasurementOperator::basis(2, 1).unwrap();
        let seq = probability_sequence(&p, &make_amplitude_damping(gamma).unwrap(), &m, 20).unwrap();
        for (n, &v) in seq.iter().enumerate() {
            assert!((v - (1.0 - gamma).powi(n as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn superoperator_of_identity_and_sqrt_x() {
        assert_eq!(superoperator_matrix(&KrausChannel::identity(2)), ComplexMatrix::identity(4));
        let s = eigenvalues(&superoperator_matrix(&sqrt_x_channel())).unwrap();
        assert!(s.distance_to(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)]) < 1e-9);
    }

    #[test]
    fn unitary_superoperator_spectrum_is_all_pairs() {
        let (t1, t2) = (0.4_f64, -1.3_f64);
        let u = ComplexMatrix::diagonal(&[Complex64::from_polar(1.0, t1), Complex64::from_polar(1.0, t2)]);
        // rotate into a generic basis so the superoperator is not diagonal
        let v = random_unitary(2, &mut ChaCha8Rng::seed_from_u64(4));
        let u = v.matmul(&u).unwrap().matmul(&v.adjoint()).unwrap();
        let ch = make_unitary_channel(&u).unwrap();
        let lambdas = [Complex64::from_polar(1.0, t1), Complex64::from_polar(1.0, t2)];
        let oracle: Vec<Complex64> = lambdas
            .iter()
            .flat_map(|a| lambdas.iter().map(move |b| a * b.conj()))
            .collect();
        let s = eigenvalues(&superoperator_matrix(&ch)).unwrap();
        assert!(s.distance_to(&oracle) < 1e-9);
    }

    #[test]
    fn gell_mann_basis_is_orthonormal_and_superoperator_real() {
        for d in 2..=4 {
            let basis = gell_mann_basis(d);
            assert_eq!(basis.len(), d * d);
            for (i, a) in basis.iter().enumerate() {
                assert!(a.hermiticity_error() < 1e-15);
                for (j, b) in basis.iter().enumerate() {
                    let ip = a.matmul(b).unwrap().trace();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - c(expected, 0.0)).norm() < 1e-14);
                }
            }
            let ch = random_channel(d, 2, &mut ChaCha8Rng::seed_from_u64(d as u64));
            let sup = ch.superoperator(OperatorBasis::GellMann);
            assert!(sup.max_imag() < 1e-12);
            let s1 = eigenvalues(&sup).unwrap();
            let s2 = eigenvalues(&ch.superoperator_matrix()).unwrap();
            assert!(s1.distance_to(s2.values()) < 1e-8);
        }
    }

    #[test]
    fn presets_with_zero_rate_are_identity() {
        let id = KrausChannel::identity(2);
        assert_eq!(make_unitary_channel(&ComplexMatrix::identity(2)).unwrap(), id);
        for ch in [make_amplitude_damping(0.0), make_phase_damping(0.0), make_depolarizing(0.0)] {
            let ch = ch.unwrap();
            assert!(ch.superoperator_matrix().max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        }
        assert!(make_amplitude_damping(-0.1).is_err());
        assert!(make_phase_damping(1.1).is_err());
        let not_unitary = ComplexMatrix::diagonal(&[c(1.0, 0.0), c(0.5, 0.0)]);
        assert!(make_unitary_channel(&not_unitary).is_err());
    }

    #[test]
    fn depolarizing_contracts_bloch_vector() {
        let q = 0.3;
        let sz = MeasurementOperator::from_evolved(ComplexMatrix::diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]));
        let out = apply_heisenberg(&make_depolarizing(q).unwrap(), &sz).unwrap();
        let expected = sz.matrix().scale(c(1.0 - q, 0.0));
        assert!(out.matrix().max_abs_diff(&expected) < 1e-15);
        // x and y components contract by the same factor
        let sx = MeasurementOperator::from_evolved(ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap());
        let out = apply_heisenberg(&make_depolarizing(q).unwrap(), &sx).unwrap();
        assert!(out.matrix().max_abs_diff(&sx.matrix().scale(c(1.0 - q, 0.0))) < 1e-15);
    }

    #[test]
    fn sink_with_zero_rate_embeds_block() {
        let ch = sqrt_x_channel();
        let sunk = add_sink_state(&ch, 0.0).unwrap();
        assert_eq!(sunk.dim(), 3);
        let p = DensityMatrix::basis(2, 1).unwrap();
        let m = MeasurementOperator::basis(2, 1).unwrap();
        let a = probability_sequence(&p, &ch, &m, 8).unwrap();
        let b = probability_sequence(&p.extend_with_sink(), &sunk, &m.extend_with_sink(0.0).unwrap(), 8).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(add_sink_state(&ch, 1.0).is_err());
        assert!(add_sink_state(&ch, -0.1).is_err());
    }

    #[test]
    fn classical_state_with_sink_decays() {
        let eps = 0.05;
        let sunk = add_sink_state(&KrausChannel::identity(1), eps).unwrap();
        let p = DensityMatrix::basis(1, 0).unwrap().extend_with_sink();
        let m = MeasurementOperator::identity(1).extend_with_sink(0.0).unwrap();
        let seq = probability_sequence(&p, &sunk, &m, 12).unwrap();
        for (n, &v) in seq.iter().enumerate() {
            assert!((v - (1.0 - eps).powi(n as i32)).abs() < 1e-14);
        }
        assert!(sunk.normalization_error() < KRAUS_NORMALIZATION);
    }

    #[test]
    fn sink_response_is_configurable() {
        let eps = 0.1;
        let sunk = add_sink_state(&KrausChannel::identity(1), eps).unwrap();
        let p = DensityMatrix::basis(1, 0).unwrap().extend_with_sink();
        let m = MeasurementOperator::identity(1).extend_with_sink(1.0).unwrap();
        // the sink also triggers: total probability stays 1
        let seq = probability_sequence(&p, &sunk, &m, 6).unwrap();
        assert!(seq.iter().all(|&x| (x - 1.0).abs() < 1e-14));
    }

    #[test]
    fn normalized_spectra_contain_one_and_pair_up() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in 2..=3 {
            for _ in 0..10 {
                let ch = random_channel(d, 2, &mut rng);
                let s = eigenvalues(&ch.superoperator_matrix()).unwrap();
                assert!(s.contains(c(1.0, 0.0), KRAUS_NORMALIZATION));
                assert!(s.conjugate_pairing_error() < 1e-9);
            }
        }
    }

    #[test]
    fn modes_from_spectrum_reproduce_sequence() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let ch = random_channel(2, 2, &mut rng);
            let p = random_density(2, &mut rng);
            let m = random_measurement(2, &mut rng);
            let seq = probability_sequence(&p, &ch, &m, 16).unwrap();
            let s = eigenvalues(&ch.superoperator_matrix()).unwrap();
            let modes = ModeExpansion::fit(&s, &seq, 1e-7).unwrap();
            let rebuilt = sequence_from_modes(&modes, 16).unwrap();
            for (a, b) in seq.iter().zip(rebuilt.iter()) {
                assert!((a - b).abs() < 1e-10, "{a} vs {b}");
            }
        }
        // sqrt(X): degenerate eigenvalue 1 merges into one mode
        let p = DensityMatrix::basis(2, 1).unwrap();
        let m = MeasurementOperator::basis(2, 1).unwrap();
        let seq = probability_sequence(&p, &sqrt_x_channel(), &m, 12).unwrap();
        let s = eigenvalues(&sqrt_x_channel().superoperator_matrix()).unwrap();
        let modes = ModeExpansion::fit(&s, &seq, 1e-7).unwrap();
        assert_eq!(modes.modes.len(), 3);
        let rebuilt = modes.sequence(12).unwrap();
        for (a, b) in seq.iter().zip(rebuilt.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn random_operators_satisfy_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=5 {
            let rho = random_density(d, &mut rng);
            assert!((rho.matrix().trace() - c(1.0, 0.0)).norm() < OPERATOR);
            let _ = random_measurement(d, &mut rng);
            let ch = random_real_channel(d, 2, &mut rng);
            assert!(ch.is_real());
        }
        let t = RealMatrix::identity(2);
        assert!(ClassicalChain::new(t, vec![0.5, 0.5], vec![0.0, 1.0]).is_ok());
    }
}
