use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use starlike_bench::{bernardi, extremal_image, gamma_one, gamma_zero, smooth_series};
use starlike_core::beta::{solve_beta, solve_beta_series};
use starlike_core::conditions::{check_monotone_t33, minimize_n, NGrid};
use starlike_core::kernel::{g_integral_eval, g_series_eval};
use starlike_core::series::{series_exp, series_log, series_pow};
use starlike_core::verify::{starlike_margin, BOUNDARY_TOL};
use starlike_core::DiskGrid;

fn beta(c: &mut Criterion) {
    let w = bernardi(0.0);
    let (p0, p1) = (gamma_zero(), gamma_one());
    c.bench_function("solve_beta gamma=0", |b| {
        b.iter(|| solve_beta(black_box(&w), &p0, 1e-10).unwrap())
    });
    c.bench_function("solve_beta gamma=1", |b| {
        b.iter(|| solve_beta(black_box(&w), &p1, 1e-10).unwrap())
    });
    c.bench_function("solve_beta_series 1e5 terms", |b| {
        b.iter(|| solve_beta_series(black_box(&w), &p1, 100_000).unwrap())
    });
}

fn kernel(c: &mut Criterion) {
    let p = gamma_one();
    c.bench_function("g series t=0.9", |b| {
        b.iter(|| g_series_eval(&p, black_box(0.9), 1e-14).unwrap())
    });
    c.bench_function("g integral t=0.9", |b| {
        b.iter(|| g_integral_eval(&p, black_box(0.9), 1e-11).unwrap())
    });
}

fn series(c: &mut Criterion) {
    let s = smooth_series(64);
    c.bench_function("log N=64", |b| {
        b.iter(|| series_log(black_box(&s)).unwrap())
    });
    c.bench_function("exp(log) N=64", |b| {
        b.iter(|| series_exp(&series_log(black_box(&s)).unwrap()).unwrap())
    });
    c.bench_function("pow 1/3 N=64", |b| {
        b.iter(|| series_pow(black_box(&s), 1.0 / 3.0).unwrap())
    });
}

fn conditions(c: &mut Criterion) {
    let (w, p) = (bernardi(2.0), gamma_one());
    let mut g = c.benchmark_group("conditions");
    g.sample_size(10);
    g.bench_function("monotone grid 2001", |b| {
        b.iter(|| check_monotone_t33(&w, &p, black_box(2001)).unwrap())
    });
    g.bench_function("N functional default grid", |b| {
        b.iter(|| minimize_n(&w, &p, black_box(&NGrid::default())).unwrap())
    });
    g.finish();
}

fn disk(c: &mut Criterion) {
    let g = extremal_image(-1.816);
    let grid = DiskGrid::default();
    c.bench_function("starlike_margin default grid N=512", |b| {
        b.iter(|| starlike_margin(black_box(&g), 0.0, &grid, BOUNDARY_TOL).unwrap())
    });
}

criterion_group!(benches, beta, kernel, series, conditions, disk);
criterion_main!(benches);
