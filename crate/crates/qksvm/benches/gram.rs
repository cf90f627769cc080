//! Gram assembly benchmarks: rayon pair-parallel path against the
//! sequential fallback, for the quantum fidelity kernel and the RBF
//! baseline.
//!
//! `gram_matrix` picks the parallel path when the crate is built with the
//! default `parallel` feature; `gram_matrix_seq` is always sequential, so
//! one run shows the spread.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use qksvm::featuremap::{FeatureMapConfig, FeatureVector};
use qksvm::kernel::{gram_matrix, gram_matrix_seq, KernelConfig};

fn synthetic_rows(n: usize, dim: usize) -> Vec<FeatureVector> {
    // deterministic low-discrepancy-ish grid in [0, 1]^dim
    (0..n)
        .map(|i| {
            (0..dim)
                .map(|d| ((i * (d + 3) * 2_654_435_761) % 1_000_003) as f64 / 1_000_003.0)
                .collect()
        })
        .collect()
}

fn bench_gram(c: &mut Criterion) {
    let rows = synthetic_rows(96, 8);
    let quantum = KernelConfig::QuantumExact {
        feature_map: FeatureMapConfig::full(8),
    };
    let rbf = KernelConfig::Rbf { gamma: 0.125 };

    let mut group = c.benchmark_group("gram_96x8");
    for (name, cfg) in [("quantum_exact", &quantum), ("rbf", &rbf)] {
        group.bench_with_input(BenchmarkId::new("parallel", name), cfg, |b, cfg| {
            b.iter(|| gram_matrix(&rows, cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", name), cfg, |b, cfg| {
            b.iter(|| gram_matrix_seq(&rows, cfg).unwrap())
        });
    }
    group.finish();
}

fn bench_shots(c: &mut Criterion) {
    let rows = synthetic_rows(24, 8);
    let cfg = KernelConfig::QuantumShots {
        feature_map: FeatureMapConfig::full(8),
        shots: 1024,
        master_seed: 7,
    };
    let mut group = c.benchmark_group("gram_shots_24x8");
    group.sample_size(10);
    group.bench_function("parallel", |b| b.iter(|| gram_matrix(&rows, &cfg).unwrap()));
    group.bench_function("sequential", |b| {
        b.iter(|| gram_matrix_seq(&rows, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_gram, bench_shots);
criterion_main!(benches);
