use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use largealpha::coding::{arithmetic_decode, arithmetic_encode, huffman_build, BitWriter};
use largealpha::corpus::{gaussian_points, zipf_distribution, CategoricalSampler};
use largealpha::vq::{lattice_quantize, Lattice, LatticeKind};

const N: usize = 100_000;

fn huffman(c: &mut Criterion) {
    let mut g = c.benchmark_group("huffman");
    for d in [8u32, 16] {
        let p = zipf_distribution(1 << d, 1.2).unwrap();
        let xs = CategoricalSampler::new(&p).unwrap().sample_n(N, 1);
        g.bench_with_input(BenchmarkId::new("build", d), &p, |b, p| {
            b.iter(|| huffman_build(black_box(p.probs())).unwrap())
        });
        let code = huffman_build(p.probs()).unwrap();
        g.throughput(Throughput::Elements(N as u64));
        g.bench_with_input(BenchmarkId::new("encode", d), &xs, |b, xs| {
            b.iter(|| {
                let mut w = BitWriter::new();
                code.encode(black_box(xs), &mut w).unwrap();
                w.finish()
            })
        });
    }
    g.finish();
}

fn arithmetic(c: &mut Criterion) {
    let mut g = c.benchmark_group("arithmetic");
    g.throughput(Throughput::Elements(N as u64));
    for d in [1u32, 8, 12] {
        let p = zipf_distribution(1 << d, 1.2).unwrap();
        let xs = CategoricalSampler::new(&p).unwrap().sample_n(N, 2);
        let bits = arithmetic_encode(&xs, p.probs()).unwrap();
        g.bench_with_input(BenchmarkId::new("encode", d), &xs, |b, xs| {
            b.iter(|| arithmetic_encode(black_box(xs), p.probs()).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("decode", d), &bits, |b, bits| {
            b.iter(|| arithmetic_decode(black_box(bits), p.probs(), N).unwrap())
        });
    }
    g.finish();
}

fn lattices(c: &mut Criterion) {
    let mut g = c.benchmark_group("lattice_quantize");
    g.throughput(Throughput::Elements(N as u64));
    for kind in [
        LatticeKind::Cubic { dim: 3 },
        LatticeKind::D4,
        LatticeKind::E8,
    ] {
        let pts = gaussian_points(kind.dim(), N, 3).unwrap();
        let lattice = Lattice::new(kind, 0.5).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(kind), &pts, |b, pts| {
            b.iter(|| lattice_quantize(black_box(pts), &lattice).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, huffman, arithmetic, lattices);
criterion_main!(benches);
