//! Exact round-trip iteration of the delay-loop maps.
//!
//! Per pass, with `c = sqrt(1 - eta)`:
//! `out = sqrt(eta) a + c a_in`, `a0 = sqrt(eta) a_in - c a`,
//! `bs = S(sqrt(1 + G) b + sqrt(G) conj(f))`, `a' = sqrt(mu) bs - sqrt(1 - mu) a0`,
//! `b' = sqrt(mu) a0 + sqrt(1 - mu) bs`, where `S` scales `q` by `e^xi` and `p` by `e^-xi`.
//! Each port receives one noise sample per pass with quadrature variance `1/2 + n`.

use num_complex::Complex64;

use super::noise::Noise;
use super::{SimConfig, TimeSeries};
use crate::error::Result;
use crate::loop_model::calibrate_loop_mode;
use crate::params::{check_commensurate, LoopParams, MuMode, PsLoopParams, Validate};

type C = Complex64;

#[derive(Debug, Clone, Copy)]
struct LoopMap {
    eta: f64,
    tau: f64,
    mu: f64,
    g: f64,
    xi: f64,
    n_th: f64,
    omega0: f64,
}

/// Noise-free one-pass map on `(Re a, Im a, Re b, Im b)`.
pub fn loop_pass_matrix(eta: f64, mu: f64, g: f64, xi: f64) -> [[f64; 4]; 4] {
    let c = (1.0 - eta).sqrt();
    let (m, mp) = (mu.sqrt(), (1.0 - mu).sqrt());
    let amp = (1.0 + g).sqrt();
    let (eq, ep) = (xi.exp(), (-xi).exp());
    // a' = mp c a + m S(amp b), b' = -m c a + mp S(amp b), S = diag(eq, ep) per quadrature
    [
        [mp * c, 0.0, m * amp * eq, 0.0],
        [0.0, mp * c, 0.0, m * amp * ep],
        [-m * c, 0.0, mp * amp * eq, 0.0],
        [0.0, -m * c, 0.0, mp * amp * ep],
    ]
}

#[inline]
fn squeeze(z: C, xi: f64) -> C {
    if xi == 0.0 {
        z
    } else {
        C::new(xi.exp() * z.re, (-xi).exp() * z.im)
    }
}

fn run(map: LoopMap, cfg: &SimConfig) -> Result<TimeSeries> {
    check_commensurate(map.omega0, map.tau)?;
    let dec = cfg.decimation;
    let dt_out = map.tau * dec as f64;
    let n = cfg.check(dt_out)?;
    let burn = (cfg.burn_in / dt_out).round() as usize;
    let LoopMap {
        eta,
        tau,
        mu,
        g,
        xi,
        n_th,
        ..
    } = map;
    let (se, c) = (eta.sqrt(), (1.0 - eta).sqrt());
    let (m, mp) = (mu.sqrt(), (1.0 - mu).sqrt());
    let (amp, ga) = ((1.0 + g).sqrt(), g.sqrt());
    let damp = (-cfg.gamma_reg * tau).exp();
    let var = 0.5 + n_th;
    // Per-pass samples are field integrals over one round trip.
    let scale = 1.0 / (tau.sqrt() * dec as f64);
    let mut noise = Noise::new(cfg.seed, cfg.noise);
    let [mut a, mut b] = cfg.initial_state;
    let mut field = Vec::with_capacity(n);
    for k in 0..burn + n {
        let mut acc = C::new(0.0, 0.0);
        for _ in 0..dec {
            let a_in = noise.field(var);
            let f = noise.field(var);
            acc += se * a + c * a_in;
            let a0 = se * a_in - c * a;
            let bs = squeeze(amp * b + ga * f.conj(), xi);
            a = damp * (m * bs - mp * a0);
            b = damp * (m * a0 + mp * bs);
        }
        if k >= burn {
            field.push(acc * scale);
        }
    }
    TimeSeries {
        dt: dt_out,
        t0: burn as f64 * dt_out,
        omega0: map.omega0,
        field,
    }
    .checked()
}

/// PT-symmetric delay loop; one output sample per `cfg.decimation` round trips.
pub fn simulate_loop(p: &LoopParams, cfg: &SimConfig) -> Result<TimeSeries> {
    p.check()?;
    let cal = calibrate_loop_mode(p.eta, p.eps, p.mu_mode)?;
    run(
        LoopMap {
            eta: p.eta,
            tau: p.tau,
            mu: cal.mu,
            g: cal.g,
            xi: 0.0,
            n_th: p.n_th,
            omega0: p.omega0,
        },
        cfg,
    )
}

/// Phase-sensitive delay loop (squeezer after the amplifier).
pub fn simulate_ps_loop(p: &PsLoopParams, cfg: &SimConfig) -> Result<TimeSeries> {
    p.check()?;
    let g = p.calibrated_gain()?;
    let mu = calibrate_loop_mode(p.eta, p.eps, MuMode::Exact)?.mu;
    run(
        LoopMap {
            eta: p.eta,
            tau: p.tau,
            mu,
            g,
            xi: p.xi,
            n_th: p.n_th,
            omega0: p.omega0,
        },
        cfg,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat_vec(m: &[[f64; 4]; 4], v: [f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = (0..4).map(|j| m[i][j] * v[j]).sum();
        }
        out
    }

    #[test]
    fn noiseless_iteration_is_matrix_power() {
        let p = PsLoopParams::new(0.1, 1.0, 0.05, 0.0, 0.02, 0.0).unwrap();
        let g = p.calibrated_gain().unwrap();
        let mu = calibrate_loop_mode(0.1, 0.05, MuMode::Exact).unwrap().mu;
        let mut cfg = SimConfig::new(1.0, 8.0 * 256.0, 0);
        cfg.segments = 8;
        cfg.noise = false;
        cfg.initial_state = [C::new(0.3, -0.2), C::new(1.0, 0.7)];
        let y = simulate_ps_loop(&p, &cfg).unwrap();
        let m = loop_pass_matrix(0.1, mu, g, 0.02);
        let mut v = [0.3, -0.2, 1.0, 0.7];
        for (k, out) in y.field.iter().enumerate() {
            let expect = C::new(v[0], v[1]) * 0.1f64.sqrt();
            let scale = 0.1f64.sqrt() * v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((out - expect).norm() <= 1e-10 * scale, "{k} {out} {expect}");
            v = mat_vec(&m, v);
        }
    }
}
