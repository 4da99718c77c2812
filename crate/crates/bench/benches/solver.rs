use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use tcollapse::{run, sort_periodic, step, Anchor};
use tcollapse_bench::{economy, scrambled, smooth_state};

fn bench_sort(c: &mut Criterion) {
    let mut g = c.benchmark_group("sort_periodic");
    for m in [1usize << 10, 1 << 13, 1 << 16] {
        g.throughput(Throughput::Elements(m as u64));
        let monotone = smooth_state(m).xi().clone();
        g.bench_with_input(BenchmarkId::new("monotone", m), &monotone, |b, p| {
            b.iter(|| sort_periodic(black_box(p), Anchor::MeanClosest))
        });
        let mixed = scrambled(m, 2.5);
        g.bench_with_input(BenchmarkId::new("scrambled", m), &mixed, |b, p| {
            b.iter(|| sort_periodic(black_box(p), Anchor::MeanClosest))
        });
        g.bench_with_input(BenchmarkId::new("scrambled_l2", m), &mixed, |b, p| {
            b.iter(|| sort_periodic(black_box(p), Anchor::L2Input))
        });
    }
    g.finish();
}

fn bench_step(c: &mut Criterion) {
    let mut g = c.benchmark_group("step");
    for m in [1usize << 12, 1 << 14, 1 << 16] {
        g.throughput(Throughput::Elements(m as u64));
        let cfg = economy(m, 1e-4, 1);
        let s = smooth_state(m);
        g.bench_with_input(BenchmarkId::from_parameter(m), &s, |b, s| {
            b.iter(|| step(black_box(s), &cfg, 0).unwrap())
        });
    }
    g.finish();
}

fn bench_run(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_40_steps");
    g.sample_size(10);
    for m in [1usize << 14, 1 << 15] {
        let cfg = economy(m, 1e-5, 40).with_save_stride(40);
        let s = smooth_state(m);
        g.bench_with_input(BenchmarkId::from_parameter(m), &s, |b, s| {
            b.iter(|| run(&cfg, black_box(s)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_sort, bench_step, bench_run);
criterion_main!(benches);
