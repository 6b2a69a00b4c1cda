use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pdsphere::analysis::random_diagram;
use pdsphere::{densify, kde, sphere, wasserstein, DensityParams, Order};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn hilbert(c: &mut Criterion) {
    let mut group = c.benchmark_group("hilbert");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (a, b) = (random_diagram(&mut rng, 30), random_diagram(&mut rng, 30));
    for k in [32, 64, 128] {
        let params = DensityParams::new(k, 0.05).unwrap();
        let (pa, pb) = (densify(&a, params).unwrap(), densify(&b, params).unwrap());
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |bench, _| {
            bench.iter(|| sphere::distance(black_box(&pa), black_box(&pb)).unwrap())
        });
    }
    group.finish();
}

fn w1(c: &mut Criterion) {
    let mut group = c.benchmark_group("w1");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [10, 20, 40] {
        let (a, b) = (random_diagram(&mut rng, n), random_diagram(&mut rng, n));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |bench, _| {
            bench.iter(|| wasserstein(black_box(&a), black_box(&b), Order::L1).unwrap())
        });
    }
    group.finish();
}

fn density(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let pd = random_diagram(&mut rng, 30);
    c.bench_function("kde_k64_n30", |bench| {
        bench.iter(|| kde(black_box(&pd), 0.05, 64).unwrap())
    });
}

criterion_group!(benches, hilbert, w1, density);
criterion_main!(benches);
