use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qdw_core::channels::{make_amplitude_damping, make_depolarizing, sqrt_x_channel};
use qdw_core::linalg::{det, eigenvalues, RealMatrix};
use qdw_core::maxima::enumerate_binary;
use qdw_core::witnesses::{witness_gradient, witness_hessian};
use qdw_core::WitnessKind;

// deterministic, well spread points in (0, 1)
fn probs(len: usize) -> Vec<f64> {
    (0..len).map(|i| 0.5 + 0.45 * (1.7 * i as f64 + 0.3).sin()).collect()
}

fn bench_det(c: &mut Criterion) {
    let mut g = c.benchmark_group("det");
    for n in [4usize, 8, 16] {
        let v = probs(n * n);
        let m = RealMatrix::from_fn(n, n, |i, j| v[i * n + j] + if i == j { 1.0 } else { 0.0 });
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| det(black_box(m)).unwrap()));
    }
    g.finish();
}

fn bench_gradients(c: &mut Criterion) {
    let mut g = c.benchmark_group("gradient");
    for kind in [WitnessKind::W(3), WitnessKind::W(4), WitnessKind::W(8), WitnessKind::F1, WitnessKind::F2] {
        let p = probs(kind.required_length());
        g.bench_with_input(BenchmarkId::from_parameter(kind), &p, |b, p| {
            b.iter(|| witness_gradient(kind, black_box(p)).unwrap())
        });
    }
    g.finish();
    let p = probs(WitnessKind::W(4).required_length());
    c.bench_function("hessian/W4", |b| b.iter(|| witness_hessian(WitnessKind::W(4), black_box(&p)).unwrap()));
}

fn bench_enumeration(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_binary");
    g.sample_size(10);
    for n in [4usize, 5, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| enumerate_binary(n).unwrap()));
    }
    g.finish();
}

fn bench_eigenvalues(c: &mut Criterion) {
    let qubit = sqrt_x_channel()
        .then(&make_amplitude_damping(1e-3).unwrap())
        .and_then(|ch| ch.then(&make_depolarizing(1e-3).unwrap()))
        .unwrap()
        .superoperator_real();
    c.bench_function("eigenvalues/qubit superoperator", |b| b.iter(|| eigenvalues(black_box(&qubit)).unwrap()));
    let n = 9;
    let v = probs(n * n);
    let m = RealMatrix::from_fn(n, n, |i, j| v[i * n + j]);
    c.bench_function("eigenvalues/9x9 real", |b| b.iter(|| eigenvalues(black_box(&m)).unwrap()));
}

criterion_group!(benches, bench_det, bench_gradients, bench_enumeration, bench_eigenvalues);
criterion_main!(benches);
