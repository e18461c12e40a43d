use std::f64::consts::FRAC_PI_2;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use rayon::ThreadPoolBuilder;

use thermolimit::catdynamics::{cat_state, fidelity_sweep, wigner, Axis, CatModel, CatParams};
use thermolimit::ensemble::{BruteForceEnsemble, EnsembleSpec, SubsystemSpec};
use thermolimit::hilbert::{Operator, StateVector};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("sequential", ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("parallel", ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn wigner_grid(c: &mut Criterion) {
    let cat = cat_state(2.0, FRAC_PI_2, 40).unwrap();
    let x = Axis::symmetric(5.0, 64).unwrap();
    let p = Axis::symmetric(5.0, 64).unwrap();
    let mut group = c.benchmark_group("wigner_64x64");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| black_box(wigner(&cat, x, p).unwrap())))
        });
    }
    group.finish();
}

fn ensemble_time_grid(c: &mut Criterion) {
    let template =
        SubsystemSpec::new(Operator::sigma_z().scale(0.5), Operator::sigma_x(), StateVector::qubit_angle(0.4)).unwrap();
    let brute = BruteForceEnsemble::new(&EnsembleSpec::replicated(template, 8).unwrap()).unwrap();
    let times: Vec<f64> = (0..64).map(|k| 0.05 * k as f64).collect();
    let mut group = c.benchmark_group("ensemble_n8_64_times");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| black_box(brute.stats_on_grid(&times).unwrap())))
        });
    }
    group.finish();
}

fn cat_sweep(c: &mut Criterion) {
    let models: Vec<CatModel> = [1, 2, 4, 8]
        .iter()
        .map(|&n| CatModel::new(CatParams { n, gamma: Complex64::new(0.1, 0.0), ..CatParams::default() }).unwrap())
        .collect();
    let times: Vec<f64> = (0..16).map(|k| 4.0 * std::f64::consts::PI * k as f64 / 15.0).collect();
    let mut group = c.benchmark_group("cat_fidelity_sweep");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| pool.install(|| black_box(fidelity_sweep(&models, &times).unwrap())))
        });
    }
    group.finish();
}

criterion_group!(benches, wigner_grid, ensemble_time_grid, cat_sweep);
criterion_main!(benches);
