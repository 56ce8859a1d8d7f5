use corridor_core::analysis::{quantile_corridor, tapering_point, Interval};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn intervals(n: usize) -> Vec<Interval> {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    (0..n)
        .map(|_| {
            let lo: f64 = rng.random_range(0.0..30.0);
            Interval::new(lo, lo + rng.random_range(0.0..10.0)).unwrap()
        })
        .collect()
}

fn corridors(c: &mut Criterion) {
    let mut group = c.benchmark_group("quantile corridor");
    for n in [10, 216, 5000] {
        let set = intervals(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &set, |b, s| {
            b.iter(|| quantile_corridor(s, 0.75).unwrap())
        });
    }
    group.finish();
    let set = intervals(216);
    c.bench_function("tapering point 216", |b| b.iter(|| tapering_point(&set).unwrap()));
}

criterion_group!(benches, corridors);
criterion_main!(benches);
