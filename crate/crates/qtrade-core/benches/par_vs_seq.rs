//! Parallel vs sequential throughput on the two workloads that dominate
//! scans: batch entropy evaluation and batch measure optimization.
//!
//! `seq_map` is always sequential; `maybe_par_map` uses rayon under the
//! default `parallel` feature and degrades to the same sequential loop
//! without it, so this bench quantifies exactly what the feature buys.

use criterion::{criterion_group, criterion_main, Criterion};
use qtrade_core::entropy::{tsallis_entropy, QParam};
use qtrade_core::measures::q_cc;
use qtrade_core::optimize::OptConfig;
use qtrade_core::parallel::{maybe_par_map, seq_map};
use qtrade_core::qstate::random_mixed;
use qtrade_core::DensityMatrix;

fn entropy_states(n: usize) -> Vec<DensityMatrix> {
    (0..n)
        .map(|i| random_mixed(8, 6, i as u64).unwrap())
        .collect()
}

fn measure_states(n: usize) -> Vec<DensityMatrix> {
    (0..n)
        .map(|i| {
            random_mixed(4, 3, 100 + i as u64)
                .unwrap()
                .with_dims(vec![2, 2])
                .unwrap()
        })
        .collect()
}

fn bench_entropy_batch(c: &mut Criterion) {
    let states = entropy_states(256);
    let qp = QParam::new(2.0).unwrap();
    let mut group = c.benchmark_group("entropy-batch-256");
    group.bench_function("sequential", |b| {
        b.iter(|| {
            seq_map(&states, |rho| tsallis_entropy(rho, &qp).unwrap())
                .iter()
                .sum::<f64>()
        })
    });
    group.bench_function("parallel", |b| {
        b.iter(|| {
            maybe_par_map(&states, |rho| tsallis_entropy(rho, &qp).unwrap())
                .iter()
                .sum::<f64>()
        })
    });
    group.finish();
}

fn bench_measure_batch(c: &mut Criterion) {
    let states = measure_states(8);
    let qp = QParam::new(2.0).unwrap();
    // single-restart configs so the outer map is the only parallelism
    let cfg = OptConfig {
        restarts: 1,
        max_iters: 300,
        seed: 3,
        ..OptConfig::default()
    };
    let mut group = c.benchmark_group("qcc-batch-8");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| {
            seq_map(&states, |rho| q_cc(rho, &qp, &cfg).unwrap().value)
                .iter()
                .sum::<f64>()
        })
    });
    group.bench_function("parallel", |b| {
        b.iter(|| {
            maybe_par_map(&states, |rho| q_cc(rho, &qp, &cfg).unwrap().value)
                .iter()
                .sum::<f64>()
        })
    });
    group.finish();
}

fn bench_restart_parallelism(c: &mut Criterion) {
    let rho = measure_states(1).pop().unwrap();
    let qp = QParam::new(1.5).unwrap();
    let cfg = OptConfig {
        restarts: 8,
        max_iters: 300,
        seed: 7,
        ..OptConfig::default()
    };
    // restarts fan out through maybe_par_map_indices inside optimize()
    let mut group = c.benchmark_group("qcc-8-restarts");
    group.sample_size(10);
    group.bench_function("one-state", |b| {
        b.iter(|| q_cc(&rho, &qp, &cfg).unwrap().value)
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_entropy_batch,
    bench_measure_batch,
    bench_restart_parallelism
);
criterion_main!(benches);
