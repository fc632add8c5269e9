use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use epsense_core::loop_model::loop_output_spectrum;
use epsense_core::markovian::{pt_eigenfrequencies, pt_output_spectrum_exact};
use epsense_core::stochastic::{simulate_loop, simulate_passive, welch, SimConfig, Window};
use epsense_core::{Complex64, Grid, LoopParams, PassiveParams, PtParams, Quadrature};

fn analytic(c: &mut Criterion) {
    let p = PtParams::new(0.0, 1.0, 1e-3, 0.0, 0.0).unwrap();
    c.bench_function("pt_eigenfrequencies", |b| b.iter(|| pt_eigenfrequencies(black_box(&p))));

    let grid = Grid::linear(-0.3, 0.3, 10_000).unwrap();
    c.bench_function("pt_spectrum_10k", |b| {
        b.iter(|| pt_output_spectrum_exact(black_box(&p), &grid, Quadrature::P))
    });

    let lp = LoopParams::new(1e-3, 5e-4, 1e-2, 0.0, 0.0).unwrap();
    let lgrid = Grid::linear(-0.3, 0.3, 10_000).unwrap();
    c.bench_function("loop_spectrum_10k", |b| {
        b.iter(|| loop_output_spectrum(black_box(&lp), &lgrid))
    });
}

fn stochastic(c: &mut Criterion) {
    let samples: Vec<Complex64> = (0..1 << 16)
        .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
        .collect();
    c.bench_function("welch_64k_hann", |b| {
        b.iter(|| welch(black_box(&samples), 0.05, 32, Window::Hann))
    });

    let pp = PassiveParams::new(0.0, 1.0, 0.5, 0.5, 0.0, 1.0).unwrap();
    let cfg = SimConfig::new(0.05, 0.05 * 65536.0, 1);
    c.bench_function("simulate_passive_64k", |b| {
        b.iter(|| simulate_passive(black_box(&pp), &cfg))
    });

    let lp = LoopParams::new(1e-2, 5e-3, 1e-2, 0.0, 0.0).unwrap();
    let mut lcfg = SimConfig::new(5e-3, 5e-3 * 10.0 * 4096.0, 1);
    lcfg.decimation = 10;
    c.bench_function("simulate_loop_40k_trips", |b| {
        b.iter(|| simulate_loop(black_box(&lp), &lcfg))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = analytic, stochastic
}
criterion_main!(benches);
