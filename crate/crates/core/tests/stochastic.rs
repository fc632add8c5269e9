use epsense_core::stochastic::{simulate_loop, simulate_passive, welch_psd, SimConfig};
use epsense_core::{LoopParams, PassiveParams, Quadrature};

fn passive_psd(seed: u64, threads: usize) -> Vec<f64> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let p = PassiveParams::new(0.0, 1.0, 0.5, 0.5, 0.0, 1.0).unwrap();
        let mut cfg = SimConfig::new(0.05, 0.5 * 65.0 * 512.0 * 0.05, seed);
        cfg.segments = 64;
        let y = simulate_passive(&p, &cfg).unwrap();
        welch_psd(&y, Quadrature::P, &cfg).unwrap().values
    })
}

#[test]
fn welch_estimate_is_independent_of_worker_count() {
    let one = passive_psd(5, 1);
    let many = passive_psd(5, 4);
    assert_eq!(one.len(), many.len());
    assert!(one.iter().zip(&many).all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn seeds_select_independent_realizations() {
    assert_ne!(passive_psd(5, 1), passive_psd(6, 1));
}

#[test]
fn loop_run_is_reproducible() {
    let p = LoopParams::new(1e-2, 5e-3, 1e-2, 0.0, 0.0).unwrap();
    let mut cfg = SimConfig::new(0.05, 8.0 * 256.0 * 0.05, 3);
    cfg.segments = 8;
    cfg.decimation = 10;
    let a = simulate_loop(&p, &cfg).unwrap();
    let b = simulate_loop(&p, &cfg).unwrap();
    assert_eq!(a.field, b.field);
    assert!(a.field.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
}
