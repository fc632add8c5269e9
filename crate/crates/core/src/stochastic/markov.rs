//! Markovian Langevin integration with exact zero-order-hold propagators.
//!
//! Inputs are held constant over each step, so `x_{k+1} = Phi x_k + Gamma u_k` is exact, and the
//! recorded output is the exact block average `(Gamma x_k + Lambda u_k)/dt` of the intracavity
//! field, out-coupled through the boundary condition.

use num_complex::Complex64;

use super::noise::Noise;
use super::{SimConfig, TimeSeries};
use crate::error::{Error, Result};
use crate::linalg::{propagators, Mat2};
use crate::markovian::eigen::{passive_matrix, pt_matrix};
use crate::mean_field::MeanField;
use crate::params::{PassiveParams, PtParams, Validate};

type C = Complex64;

/// Per-step inputs: drive of `(a, b)`, the reflected input subtracted at the output, and any
/// deterministic output added on top.
struct StepInput {
    u: [C; 2],
    direct: C,
    extra: C,
}

fn regularized(a: Mat2, gamma_reg: f64) -> Mat2 {
    let mut m = a;
    for k in 0..2 {
        m.0[k][k] -= gamma_reg;
    }
    m
}

fn check_resolution(a: &Mat2, dt: f64) -> Result<()> {
    let rate = a.eigenvalues().iter().map(|l| l.norm()).fold(0.0, f64::max);
    if rate * dt > 0.1 {
        return Err(Error::Resolution(format!(
            "dt = {dt} s is too coarse: dt * max|eigenvalue| = {} > 0.1; use dt <= {}",
            rate * dt,
            0.1 / rate
        )));
    }
    Ok(())
}

fn integrate(
    a: &Mat2,
    coupling: f64,
    omega0: f64,
    cfg: &SimConfig,
    mut input: impl FnMut(f64) -> StepInput,
) -> Result<TimeSeries> {
    let n = cfg.check(cfg.dt)?;
    check_resolution(a, cfg.dt)?;
    let dt = cfg.dt;
    let burn = (cfg.burn_in / dt).round() as usize;
    let pr = propagators(a, dt);
    let mut x = cfg.initial_state;
    let mut field = Vec::with_capacity(n);
    for k in 0..burn + n {
        let t_mid = (k as f64 + 0.5) * dt;
        let s = input(t_mid);
        let gx = pr.gamma.mul_vec(x);
        let lu = pr.lambda.mul_vec(s.u);
        if k >= burn {
            field.push(coupling * (gx[0] + lu[0]) / dt - s.direct + s.extra);
        }
        let px = pr.phi.mul_vec(x);
        let gu = pr.gamma.mul_vec(s.u);
        x = [px[0] + gu[0], px[1] + gu[1]];
    }
    TimeSeries {
        dt,
        t0: burn as f64 * dt,
        omega0,
        field,
    }
    .checked()
}

/// Passive two-mode sensor driven by thermal inputs at `n_a`, `n_b`.
pub fn simulate_passive(p: &PassiveParams, cfg: &SimConfig) -> Result<TimeSeries> {
    p.check()?;
    let a = regularized(passive_matrix(&PassiveParams { omega0: 0.0, ..*p }), cfg.gamma_reg);
    let (ka, kb) = ((2.0 * p.gamma_a).sqrt(), (2.0 * p.gamma_b).sqrt());
    let (va, vb) = ((0.5 + p.n_a) / cfg.dt, (0.5 + p.n_b) / cfg.dt);
    let mut noise = Noise::new(cfg.seed, cfg.noise);
    integrate(&a, ka, p.omega0, cfg, |_| {
        let a_in = noise.field(va);
        let b_in = noise.field(vb);
        StepInput {
            u: [ka * a_in, kb * b_in],
            direct: a_in,
            extra: C::new(0.0, 0.0),
        }
    })
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Linearized PT-symmetric sensor around the two-carrier steady state `mean`.
///
/// The output contains the out-coupled carriers plus fluctuations. `delta_eps`, evaluated at
/// step midpoints, modulates the inter-mode coupling and is transduced through the carriers.
/// The amplifier noise enters the gain mode conjugated.
pub fn simulate_pt_markovian(
    p: &PtParams,
    mean: &MeanField,
    cfg: &SimConfig,
    delta_eps: Option<&dyn Fn(f64) -> f64>,
) -> Result<TimeSeries> {
    p.check()?;
    let g = p.gamma;
    let a = regularized(pt_matrix(0.0, g, p.eps_bar), cfg.gamma_reg);
    let k = (2.0 * g).sqrt();
    let (vi, va) = ((0.5 + p.n_in) / cfg.dt, (0.5 + p.n_amp) / cfg.dt);
    let s = p.half_splitting();
    let hold = sinc(0.5 * s * cfg.dt);
    let mut noise = Noise::new(cfg.seed, cfg.noise);
    integrate(&a, k, p.omega0, cfg, |t| {
        let a_in = noise.field(vi);
        let f = noise.field(va);
        let mut u = [k * a_in, k * f.conj()];
        if let Some(de) = delta_eps {
            let d = g * de(t);
            u[0] += d * mean.b_at(s, t);
            u[1] -= d * mean.a_at(s, t);
        }
        StepInput {
            u,
            direct: a_in,
            extra: k * hold * mean.a_at(s, t),
        }
    })
}
