use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use radix_bench::{golden, nested_n, power_recip, ramanujan};
use radix_core::{
    approximant, gap_bound_polya_szego_sweep, gap_identity, parse_sequence_expr, tail_bound,
    tail_table, TailStrategy,
};

fn bench_approximant(c: &mut Criterion) {
    let mut g = c.benchmark_group("approximant");
    let spec = golden(80);
    for &bits in &[128usize, 256, 512] {
        g.bench_with_input(BenchmarkId::new("golden_n32", bits), &bits, |b, &bits| {
            b.iter(|| approximant(&spec, 32, bits).unwrap())
        });
    }
    let ram = ramanujan(80);
    g.bench_function("ramanujan_n50_512", |b| {
        b.iter(|| approximant(&ram, 50, 512).unwrap())
    });
    let mixed = nested_n(80);
    g.bench_function("nested_n_n24_256", |b| {
        b.iter(|| approximant(&mixed, 24, 256).unwrap())
    });
    let pow = power_recip(80);
    g.bench_function("power_recip_n24_256", |b| {
        b.iter(|| approximant(&pow, 24, 256).unwrap())
    });
    g.finish();
}

fn bench_tables_and_bounds(c: &mut Criterion) {
    let mut g = c.benchmark_group("bounds");
    let mixed = nested_n(80);
    g.bench_function("tail_table_n24_256", |b| {
        b.iter(|| tail_table(&mixed, 24, 256).unwrap())
    });
    g.bench_function("gap_identity_n12_256", |b| {
        b.iter(|| gap_identity(&mixed, 12, 256).unwrap())
    });
    g.bench_function("polya_szego_sweep_n24_256", |b| {
        b.iter(|| gap_bound_polya_szego_sweep(&mixed, 24, 256).unwrap())
    });
    let spec = golden(80);
    g.bench_function("tail_bound_golden_from10_128", |b| {
        b.iter(|| tail_bound(&spec, 10, TailStrategy::GeometricMajorization, 128, 16).unwrap())
    });
    g.finish();
}

fn bench_parser(c: &mut Criterion) {
    c.bench_function("parse_sequence_expr", |b| {
        b.iter(|| parse_sequence_expr("2^(2^n*n) + n*(n+1)/2 - 7").unwrap())
    });
}

criterion_group!(benches, bench_approximant, bench_tables_and_bounds, bench_parser);
criterion_main!(benches);
