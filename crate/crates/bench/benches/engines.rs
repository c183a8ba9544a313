use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fixpoint_bench::{path_closure, random_all_pairs, random_marriage};
use fixpoint_core::engine::parallel::threaded::run_threaded;
use fixpoint_core::{
    audit_family, run_distributed, run_interleaved, run_parallel, FairSchedule, ParallelConfig, StalenessParams,
    WriteMode,
};

fn closure_engines(c: &mut Criterion) {
    let mut group = c.benchmark_group("path-closure");
    group.sample_size(20);
    for n in [8usize, 16, 32] {
        let fam = path_closure(n);
        group.bench_with_input(BenchmarkId::new("parallel-synchronous", n), &fam, |b, f| {
            b.iter(|| run_parallel(black_box(f), &ParallelConfig::synchronous()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel-seeded", n), &fam, |b, f| {
            b.iter(|| run_parallel(black_box(f), &ParallelConfig::seeded(1)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("interleaved-round-robin", n), &fam, |b, f| {
            b.iter(|| run_interleaved(black_box(f), &FairSchedule::round_robin()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("threaded-4", n), &fam, |b, f| {
            b.iter(|| run_threaded(black_box(f), WriteMode::UpdateOnChange, 4, 1000).unwrap())
        });
    }
    group.finish();
}

fn staleness(c: &mut Criterion) {
    let mut group = c.benchmark_group("distributed-staleness");
    group.sample_size(20);
    let fam = random_all_pairs(3, 6);
    for t in [0usize, 1, 3, 5] {
        group.bench_with_input(BenchmarkId::new("all-pairs-uniform", t), &t, |b, &t| {
            b.iter(|| run_distributed(&fam, &StalenessParams::uniform(t, 7), None).unwrap())
        });
    }
    let fam = random_marriage(3, 6);
    for t in [0usize, 3] {
        group.bench_with_input(BenchmarkId::new("marriage-max-delay", t), &t, |b, &t| {
            b.iter(|| run_distributed(&fam, &StalenessParams::max_delay(t), None).unwrap())
        });
    }
    group.finish();
}

fn audit(c: &mut Criterion) {
    let fam = random_marriage(11, 4);
    c.bench_function("audit-marriage", |b| b.iter(|| audit_family(black_box(&fam), 1000, 0)));
}

criterion_group!(benches, closure_engines, staleness, audit);
criterion_main!(benches);
