use proptest::prelude::*;
use qdw_core::channels::{
    add_sink_state, damped_rotation_modes, make_depolarizing, random_channel, random_density, random_measurement,
    random_real_channel, random_real_density, random_real_measurement, sqrt_x_channel, ClassicalChain,
    DensityMatrix, MeasurementOperator,
};
use qdw_core::tolerances::{DET_EQUALITY, IDEAL_NULL, RANK_NULL, RANK_NULL_QUTRIT};
use qdw_core::witnesses::{evaluate, witness_f1, witness_f2, witness_w, witness_w_tilde};
use qdw_core::WitnessKind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ket1() -> (DensityMatrix, MeasurementOperator) {
    (DensityMatrix::basis(2, 1).unwrap(), MeasurementOperator::basis(2, 1).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classical_chains_null_at_their_dimension(seed in any::<u64>(), d in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let chain = ClassicalChain::random(d, &mut rng);
        let p = chain.sequence(2 * d).unwrap();
        prop_assert!(witness_w(&p, d).unwrap().abs() <= RANK_NULL);
    }

    #[test]
    fn complex_qubits_null_w4(seed in any::<u64>(), k in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(2, k, &mut rng);
        let p = ch.probability_sequence(&random_density(2, &mut rng), &random_measurement(2, &mut rng), 8).unwrap();
        prop_assert!(witness_w(&p, 4).unwrap().abs() <= RANK_NULL);
    }

    #[test]
    fn real_qubits_null_w3(seed in any::<u64>(), k in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_real_channel(2, k, &mut rng);
        let p = ch
            .probability_sequence(&random_real_density(2, &mut rng), &random_real_measurement(2, &mut rng), 6)
            .unwrap();
        prop_assert!(witness_w(&p, 3).unwrap().abs() <= RANK_NULL);
    }

    #[test]
    fn leaky_qubits_null_w5(seed in any::<u64>(), leak in 0.0f64..0.2, response in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = add_sink_state(&random_channel(2, 2, &mut rng), leak).unwrap();
        let state = random_density(2, &mut rng).extend_with_sink();
        let m = random_measurement(2, &mut rng).extend_with_sink(response).unwrap();
        let p = ch.probability_sequence(&state, &m, 10).unwrap();
        prop_assert!(witness_w(&p, 5).unwrap().abs() <= RANK_NULL);
    }

    #[test]
    fn determinant_forms_agree(p in proptest::collection::vec(0.0f64..=1.0, 16), n in 1usize..=8) {
        let a = witness_w(&p, n).unwrap();
        let b = witness_w_tilde(&p, n).unwrap();
        prop_assert!((a - b).abs() <= DET_EQUALITY * a.abs().max(1.0), "{a} vs {b}");
    }

    #[test]
    fn witnesses_reverse_and_complement(p in proptest::collection::vec(0.0f64..=1.0, 8)) {
        // W_N is invariant under p -> 1 - p up to sign (-1)^N
        let q: Vec<f64> = p.iter().map(|x| 1.0 - x).collect();
        for n in 1..=4 {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((witness_w(&p, n).unwrap() - s * witness_w(&q, n).unwrap()).abs() <= 1e-12);
        }
    }
}

#[test]
fn qutrit_channels_null_w9() {
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ch = random_channel(3, 3, &mut rng);
        let p = ch.probability_sequence(&random_density(3, &mut rng), &random_measurement(3, &mut rng), 18).unwrap();
        assert!(witness_w(&p, 9).unwrap().abs() <= RANK_NULL_QUTRIT, "seed {seed}");
    }
}

#[test]
fn ideal_sqrt_x_nulls_every_witness() {
    let (rho, m) = ket1();
    let p = sqrt_x_channel().probability_sequence(&rho, &m, 8).unwrap();
    for (i, want) in [1.0, 0.5, 0.0, 0.5, 1.0, 0.5, 0.0, 0.5].into_iter().enumerate() {
        assert!((p[i] - want).abs() < 1e-14);
    }
    for kind in [WitnessKind::W(3), WitnessKind::W(4), WitnessKind::F1, WitnessKind::F2] {
        assert!(evaluate(kind, &p).unwrap().abs() <= IDEAL_NULL, "{kind}");
    }
}

#[test]
fn witnesses_detect_a_third_level() {
    // a generic qutrit sequence is not qubit-like
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ch = random_channel(3, 1, &mut rng);
    let p = ch.probability_sequence(&random_density(3, &mut rng), &random_measurement(3, &mut rng), 10).unwrap();
    assert!(witness_w(&p, 4).unwrap().abs() > 1e-8);
}

fn depolarized_sqrt_x(eps: f64) -> Vec<f64> {
    let (rho, m) = ket1();
    let ch = sqrt_x_channel().then(&make_depolarizing(eps).unwrap()).unwrap();
    ch.probability_sequence(&rho, &m, 8).unwrap().into_inner()
}

#[test]
fn f1_is_first_order_and_f2_second_order_in_eps() {
    // p_n = 1/2 + (1 - eps)^n cos(n pi / 2) / 2: amplitude 1/4 per mode,
    // so F1 -> 16 (1/4)^2 eps = eps and F2 -> -64 (1/4)^2 eps^2 = -4 eps^2
    for eps in [1e-2, 1e-3, 1e-4] {
        let p = depolarized_sqrt_x(eps);
        let f1 = witness_f1(&p).unwrap() / eps;
        let f2 = witness_f2(&p).unwrap() / (eps * eps);
        assert!((f1 - 1.0).abs() < 0.05, "eps {eps}: F1/eps = {f1}");
        assert!((f2 + 4.0).abs() < 0.2, "eps {eps}: F2/eps^2 = {f2}");
    }
}

#[test]
fn damped_modes_match_the_physical_channel() {
    let eps = 1e-3;
    let raw = damped_rotation_modes(0.5, 0.25, eps).raw_values(8).unwrap();
    for (a, b) in raw.iter().zip(depolarized_sqrt_x(eps)) {
        assert!((a - b).abs() < 1e-14);
    }
}

#[test]
fn unit_amplitude_modes_give_8_eps_and_32_eps2() {
    let c = std::f64::consts::FRAC_1_SQRT_2;
    for eps in [1e-2, 1e-3, 1e-4] {
        let p = damped_rotation_modes(0.5, c, eps).raw_values(8).unwrap();
        let f1 = witness_f1(&p).unwrap() / eps;
        let f2 = witness_f2(&p).unwrap() / (eps * eps);
        assert!((f1 / 8.0 - 1.0).abs() < 0.05, "{f1}");
        assert!((f2 / -32.0 - 1.0).abs() < 0.05, "{f2}");
    }
}
