//! Benchmarks for the two data-parallel hot paths: the exhaustive window
//! sweep and the transport cost matrix behind the distance estimator.
//!
//! Run `cargo bench` for the default (rayon) build and
//! `cargo bench --no-default-features` for the sequential fallback; the
//! group and function names match so the two reports line up.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use affperm::counting;
use affperm::measures;
use affperm::sampling;
use affperm::OrdinaryPermutation;

#[cfg(feature = "parallel")]
const MODE: &str = "parallel";
#[cfg(not(feature = "parallel"))]
const MODE: &str = "sequential";

fn bench_window_sweep(c: &mut Criterion) {
    let tau = OrdinaryPermutation::parse("321").unwrap();
    let mut group = c.benchmark_group("window_sweep");
    group.sample_size(10);
    for n in [5usize, 6] {
        group.bench_with_input(BenchmarkId::new(MODE, n), &n, |b, &n| {
            b.iter(|| counting::brute_avoiders(n, &tau).unwrap())
        });
    }
    group.finish();
}

fn bench_distance_estimate(c: &mut Criterion) {
    let tau = OrdinaryPermutation::parse("321").unwrap();
    let n = 6usize;
    let s = 8usize;
    let mut group = c.benchmark_group("distance_estimate");
    group.sample_size(10);
    group.bench_function(BenchmarkId::new(MODE, format!("n{n}_s{s}")), |b| {
        b.iter(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let mut draw_rng = ChaCha8Rng::seed_from_u64(11);
            measures::wass2_estimate(2, n, s, 10 * n, &mut rng, |_| {
                sampling::sample_exact(n, &tau, &mut draw_rng)
            })
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, bench_window_sweep, bench_distance_estimate);
criterion_main!(benches);
