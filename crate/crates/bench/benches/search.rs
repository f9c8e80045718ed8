use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use largealpha::bica::{order_permutation, piecewise_relaxation};
use largealpha::corpus::{rng_for, uniform_simplex, zipf_distribution, CategoricalSampler};
use largealpha::universal::{descend, DescendConfig};
use largealpha::JointDistribution;

fn simplex(d: u32) -> JointDistribution {
    JointDistribution::new(uniform_simplex(1 << d, &mut rng_for(1, 0, d as u64))).unwrap()
}

fn order(c: &mut Criterion) {
    let mut g = c.benchmark_group("order_permutation");
    for d in [10u32, 16, 20] {
        let p = simplex(d);
        g.bench_with_input(BenchmarkId::from_parameter(d), &p, |b, p| {
            b.iter(|| order_permutation(black_box(p)))
        });
    }
    g.finish();
}

fn piecewise(c: &mut Criterion) {
    let mut g = c.benchmark_group("piecewise_relaxation");
    g.sample_size(10);
    for d in [4u32, 8, 10] {
        let p = simplex(d);
        g.bench_with_input(BenchmarkId::from_parameter(d), &p, |b, p| {
            b.iter(|| piecewise_relaxation(black_box(p), 8).unwrap())
        });
    }
    g.finish();
}

fn universal(c: &mut Criterion) {
    let p = zipf_distribution(1 << 12, 1.2).unwrap();
    let xs = CategoricalSampler::new(&p).unwrap().sample_n(100_000, 1);
    let cfg = DescendConfig {
        b: 6,
        max_iters: 5,
        ..Default::default()
    };
    let mut g = c.benchmark_group("descend");
    g.sample_size(10);
    g.bench_function("zipf_4096_b6_5iters", |b| {
        b.iter(|| descend(black_box(&xs), 12, &cfg).unwrap())
    });
    g.finish();
}

criterion_group!(benches, order, piecewise, universal);
criterion_main!(benches);
