use criterion::{black_box, criterion_group, criterion_main, Criterion};

use ame_core::constructors::{construct_2mmn, construct_lmkm, construct_mmn};
use ame_core::msa::{solve_msa, MsaProblem};
use ame_core::verifier::verify_uniform;

fn bench_constructors(c: &mut Criterion) {
    let mut group = c.benchmark_group("construct");
    group.bench_function("mmn_4x4x16", |b| {
        b.iter(|| construct_mmn(black_box(4), black_box(16)).unwrap())
    });
    group.bench_function("lmkm_4x6x24", |b| {
        b.iter(|| construct_lmkm(black_box(4), black_box(6), black_box(4)).unwrap())
    });
    group.bench_function("2mmn_12x3", |b| {
        b.iter(|| construct_2mmn(black_box(12), black_box(3)).unwrap())
    });
    group.finish();
}

fn bench_solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_msa");
    group.bench_function("3x4x5", |b| {
        b.iter(|| solve_msa(&MsaProblem::new(3, 4, 5).unwrap()))
    });
    group.bench_function("4x6x9", |b| {
        b.iter(|| solve_msa(&MsaProblem::new(4, 6, 9).unwrap()))
    });
    group.finish();
}

fn bench_verifier(c: &mut Criterion) {
    let state = construct_mmn(4, 16).unwrap();
    let mut group = c.benchmark_group("verify");
    group.bench_function("uniform_4x4x16_k1", |b| {
        b.iter(|| verify_uniform(black_box(&state), 1, 1e-12).unwrap())
    });
    group.bench_function("partial_trace_4x4x16", |b| {
        b.iter(|| state.partial_trace(black_box(&[2])).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_constructors, bench_solver, bench_verifier);
criterion_main!(benches);
