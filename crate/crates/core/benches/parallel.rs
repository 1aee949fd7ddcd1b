use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use rigtv::couplings::coupling_trials;
use rigtv::exact::{mobius_edge_lattice, mobius_edge_lattice_seq, ExactEngine};
use rigtv::exec::with_threads;

fn mobius(c: &mut Criterion) {
    let input: Vec<f64> = (0..1u32 << 21).map(|i| f64::from(i.count_ones()) / 21.0).collect();
    let mut group = c.benchmark_group("mobius_n7");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| {
            let mut v = input.clone();
            mobius_edge_lattice_seq(&mut v).unwrap();
            black_box(v)
        })
    });
    group.bench_function("parallel", |b| {
        b.iter(|| {
            let mut v = input.clone();
            mobius_edge_lattice(&mut v).unwrap();
            black_box(v)
        })
    });
    group.finish();
}

fn exact_gnmp(c: &mut Criterion) {
    let engine = ExactEngine::default();
    let mut group = c.benchmark_group("exact_gnmp_n7");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| with_threads(1, || black_box(engine.dist_gnmp(7, 1000, 0.03).unwrap())))
    });
    group.bench_function("parallel", |b| b.iter(|| black_box(engine.dist_gnmp(7, 1000, 0.03).unwrap())));
    group.finish();
}

fn coupling(c: &mut Criterion) {
    let mut group = c.benchmark_group("coupling_trials");
    group.sample_size(10);
    group.bench_function("sequential", |b| {
        b.iter(|| with_threads(1, || black_box(coupling_trials(20, 100_000, 0.005, 20_000, 1).unwrap())))
    });
    group.bench_function("parallel", |b| {
        b.iter(|| black_box(coupling_trials(20, 100_000, 0.005, 20_000, 1).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, mobius, exact_gnmp, coupling);
criterion_main!(benches);
