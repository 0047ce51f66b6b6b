use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use peakspread_bench::{equal_load, equal_load_schedule, preferred, sample_rate, simulation};
use peakspread_core::{
    induced_map, optimal_arrival, optimal_arrival_fast, run_simulation, synthesize_prices,
    uniform_b_grid, verify_realization, CostParams, Money, Rate, DEFAULT_GRID_STEP,
};

fn argmin(c: &mut Criterion) {
    let mut group = c.benchmark_group("argmin");
    for n in [6, 24, 96] {
        let schedule = equal_load_schedule(n, 1);
        let params = CostParams::early_preference(sample_rate(), preferred());
        group.bench_with_input(BenchmarkId::new("fast", n), &schedule, |b, s| {
            b.iter(|| optimal_arrival_fast(black_box(&params), s).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("grid", n), &schedule, |b, s| {
            b.iter(|| optimal_arrival(black_box(&params), s).unwrap())
        });
    }
    group.finish();
}

fn synthesis(c: &mut Criterion) {
    let map = equal_load(24, 2);
    c.bench_function("synthesize_prices/24", |b| {
        b.iter(|| synthesize_prices(black_box(&map), Money::ZERO).unwrap())
    });
    let schedule = synthesize_prices(&map, Money::ZERO).unwrap();
    c.bench_function("verify_realization/24", |b| {
        b.iter(|| verify_realization(black_box(&map), &schedule).unwrap())
    });
    let grid = uniform_b_grid(DEFAULT_GRID_STEP, Rate::from_micros(300_000).unwrap()).unwrap();
    c.bench_function("induced_map/24x300", |b| {
        b.iter(|| induced_map(black_box(&schedule), preferred(), &grid).unwrap())
    });
}

fn simulate(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate_100k");
    group.sample_size(10);
    let config = simulation(100_000, 2.0);
    for workers in [1, 4] {
        group.bench_with_input(BenchmarkId::from_parameter(workers), &workers, |b, &w| {
            b.iter(|| run_simulation(black_box(&config), w).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, argmin, synthesis, simulate);
criterion_main!(benches);
