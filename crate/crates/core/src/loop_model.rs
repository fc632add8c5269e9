//! Exact delay-loop model of the PT-symmetric sensor.
//!
//! One round trip of duration `tau` passes the out-coupler (power transmissivity `eta`), the
//! inter-mode coupler (`mu`), and the amplifier (power gain `1 + G`). With
//! `omega0 tau` a multiple of 2 pi every formula depends on the round-trip detuning
//! `phi = (omega - omega0) tau` only. Poles sit at `phi = +-theta`,
//! `theta = (eta/2) sqrt(eps (2 + eps))`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{LoopParams, MuMode, Validate};
use crate::spectrum::{pole_guard, Channel, Grid, Quadrature, Spectrum, TransferFunctionSet, POLE_TOLERANCE};

/// Amplifier gain and coupler transmissivity of the loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopCalibration {
    pub g: f64,
    pub mu: f64,
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("eta must lie in (0, 1) (got {eta})")));
    }
    Ok(())
}

fn theta(eta: f64, eps: f64) -> f64 {
    0.5 * eta * (eps * (2.0 + eps)).sqrt()
}

/// `G = eta/(1 - eta)` and `mu` placing the loop resonances exactly at the EP frequencies.
///
/// `mu = 1 - 4 [cos(theta)/(sqrt(1-eta) + 1/sqrt(1-eta))]^2`, evaluated as
/// `(eta^2 + 4 (1 - eta) sin^2 theta)/(2 - eta)^2`.
pub fn calibrate_loop(eta: f64, eps: f64) -> Result<LoopCalibration> {
    calibrate_loop_mode(eta, eps, MuMode::Exact)
}

pub fn calibrate_loop_mode(eta: f64, eps: f64, mode: MuMode) -> Result<LoopCalibration> {
    check_eta(eta)?;
    if !(eps >= 0.0) {
        return Err(Error::Domain(format!("eps must be >= 0 (got {eps})")));
    }
    let mu = match mode {
        MuMode::Exact => {
            let s = theta(eta, eps).sin();
            (eta * eta + 4.0 * (1.0 - eta) * s * s) / ((2.0 - eta) * (2.0 - eta))
        }
        MuMode::Linearized => (1.0 + 2.0 * eps) * eta * eta / 4.0,
    };
    Ok(LoopCalibration {
        g: eta / (1.0 - eta),
        mu,
    })
}

/// Gains `(H_in, H_amp)` of the amplitude quadrature at complex round-trip detuning `phi`
/// (the phase quadrature flips the sign of `H_amp`) for the exactly calibrated loop.
pub fn loop_gains(eta: f64, eps: f64, phi: Complex64) -> (Complex64, Complex64) {
    let th = theta(eta, eps);
    let c = (1.0 - eta).sqrt();
    let mu = calibrate_loop(eta, eps).map(|k| k.mu).unwrap_or(f64::NAN);
    let dc = cos_difference(phi, th);
    let h_in = 2.0 * c / (2.0 - eta)
        + eta * (eta * phi.cos() + Complex64::i() * (2.0 - eta) * phi.sin()) / (2.0 * c * (2.0 - eta) * dc);
    let h_amp = eta * mu.sqrt() / (2.0 * c * dc);
    (h_in, h_amp)
}

/// `cos(phi) - cos(theta)` without cancellation near the poles.
pub(crate) fn cos_difference(phi: Complex64, th: f64) -> Complex64 {
    -2.0 * ((phi + th) * 0.5).sin() * ((phi - th) * 0.5).sin()
}

/// Gains for an arbitrary coupler transmissivity `mu`, from direct elimination of the loop equations.
pub fn loop_gains_general(eta: f64, mu: f64, phi: Complex64) -> (Complex64, Complex64) {
    let c = (1.0 - eta).sqrt();
    let g = 1.0 / c;
    let m = mu.sqrt();
    let mp = (1.0 - mu).sqrt();
    let z = (Complex64::i() * phi).exp();
    let kappa = 0.5 * (c + g) * mp;
    let one_minus_kappa = ((2.0 - eta).powi(2) * mu - eta * eta) / (4.0 * (1.0 - eta) * (1.0 + kappa));
    let det = (z - 1.0) * (z - 1.0) + 2.0 * one_minus_kappa * z;
    let a = 1.0 - c * z * mp;
    let se = eta.sqrt();
    let a_in = se * (g * z * mu - mp * det) / (a * det);
    let h_in = se * z * a_in + c;
    let h_amp = se * z * m * (eta / (1.0 - eta)).sqrt() / det;
    (h_in, h_amp)
}

/// Round-trip detuning of the two poles, `+-theta` for the exact calibration.
pub fn pole_phase(eta: f64, eps: f64, mode: MuMode) -> Result<f64> {
    let cal = calibrate_loop_mode(eta, eps, mode)?;
    match mode {
        MuMode::Exact => Ok(theta(eta, eps)),
        MuMode::Linearized => {
            let c = (1.0 - eta).sqrt();
            let kappa = 0.5 * (c + 1.0 / c) * (1.0 - cal.mu).sqrt();
            let one_minus = ((2.0 - eta).powi(2) * cal.mu - eta * eta) / (4.0 * (1.0 - eta) * (1.0 + kappa));
            if one_minus < 0.0 {
                return Err(Error::Calibration(
                    "linearized coupler leaves the loop above threshold".into(),
                ));
            }
            Ok(2.0 * (0.5 * one_minus).sqrt().asin())
        }
    }
}

/// Pole phase found by bisecting `cos(phi) - cos(phi_pole)` on `[0, pi]`, where the
/// denominator is monotone; `cos(phi_pole)` is taken from the coupler calibration.
pub fn pole_phase_by_bisection(eta: f64, eps: f64, mode: MuMode) -> Result<f64> {
    let cal = calibrate_loop_mode(eta, eps, mode)?;
    let c = (1.0 - eta).sqrt();
    let kappa = 0.5 * (c + 1.0 / c) * (1.0 - cal.mu).sqrt();
    let one_minus = ((2.0 - eta).powi(2) * cal.mu - eta * eta) / (4.0 * (1.0 - eta) * (1.0 + kappa));
    // cos(phi) - kappa = (1 - kappa) - 2 sin^2(phi/2)
    let f = |phi: f64| one_minus - 2.0 * (0.5 * phi).sin().powi(2);
    let (mut lo, mut hi) = (0.0, PI);
    if f(lo) <= 0.0 {
        return Ok(0.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Round-trip detuning wrapped to `(-pi, pi]`.
pub fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Resonances closest to `omega0`: `omega0 +- theta / tau`.
pub fn loop_resonances(p: &LoopParams) -> Result<[f64; 2]> {
    let th = pole_phase(p.eta, p.eps, p.mu_mode)?;
    Ok([p.omega0 - th / p.tau, p.omega0 + th / p.tau])
}

fn gains_for(p: &LoopParams, phi: Complex64) -> Result<(Complex64, Complex64)> {
    Ok(match p.mu_mode {
        MuMode::Exact => loop_gains(p.eta, p.eps, phi),
        MuMode::Linearized => loop_gains_general(p.eta, calibrate_loop_mode(p.eta, p.eps, p.mu_mode)?.mu, phi),
    })
}

fn guarded_phase(p: &LoopParams, w: f64, th: f64) -> Result<f64> {
    let phi = wrap_phase((w - p.omega0) * p.tau);
    pole_guard(phi, &[-th, th], POLE_TOLERANCE).map_err(|e| match e {
        Error::Pole {
            resonance, distance, ..
        } => Error::Pole {
            omega: w,
            resonance: w - (phi - resonance) / p.tau,
            distance: distance / p.tau,
        },
        other => other,
    })?;
    Ok(phi)
}

pub fn loop_transfer_functions(p: &LoopParams, grid: &Grid, x: Quadrature) -> Result<TransferFunctionSet> {
    p.check()?;
    p.check_commensurate()?;
    let th = pole_phase(p.eta, p.eps, p.mu_mode)?;
    let sign = if x == Quadrature::P { -1.0 } else { 1.0 };
    let mut hin = Vec::with_capacity(grid.len());
    let mut hamp = Vec::with_capacity(grid.len());
    for &w in grid.points() {
        let phi = guarded_phase(p, w, th)?;
        let (a, b) = gains_for(p, phi.into())?;
        hin.push(a);
        hamp.push(sign * b);
    }
    Ok(TransferFunctionSet {
        grid: grid.points().to_vec(),
        quadrature: Some(x),
        channels: vec![(Channel::In, hin), (Channel::Amp, hamp)],
    })
}

/// Output spectrum at complex round-trip detuning `phi` for the exact calibration.
pub fn loop_spectrum_at(eta: f64, eps: f64, n_th: f64, phi: Complex64) -> f64 {
    let (a, b) = loop_gains(eta, eps, phi);
    (a.norm_sqr() + b.norm_sqr()) * (0.5 + n_th)
}

/// `(|H_in|^2 + |H_amp|^2)(1/2 + n)`, identical for both quadratures.
pub fn loop_output_spectrum(p: &LoopParams, grid: &Grid) -> Result<Spectrum> {
    let tf = loop_transfer_functions(p, grid, Quadrature::P)?;
    tf.noise_spectrum(&[(Channel::In, 0.5 + p.n_th), (Channel::Amp, 0.5 + p.n_th)])
}

fn check_offset(delta_omega: f64) -> Result<()> {
    if delta_omega == 0.0 {
        return Err(Error::Divergence(
            "near-resonance spectrum diverges at zero offset".into(),
        ));
    }
    Ok(())
}

/// Near-resonance spectrum `eta^2 (1 + 2n) / (2 (1 - eta)(2 - eta)^2 tau^2 eps dw^2)`.
pub fn loop_spectrum_near_resonance(p: &LoopParams, delta_omega: f64) -> Result<f64> {
    p.check()?;
    check_offset(delta_omega)?;
    let (e, t) = (p.eta, p.tau);
    Ok(
        e * e * (1.0 + 2.0 * p.n_th)
            / (2.0 * (1.0 - e) * (2.0 - e).powi(2) * t * t * p.eps * delta_omega * delta_omega),
    )
}

/// Markovian counterpart with `gamma = eta / (2 tau)`: `gamma^2 (1 + 2n) / (2 eps dw^2)`.
pub fn loop_spectrum_markov_limit(p: &LoopParams, delta_omega: f64) -> Result<f64> {
    p.check()?;
    check_offset(delta_omega)?;
    let g = p.gamma();
    Ok(g * g * (1.0 + 2.0 * p.n_th) / (2.0 * p.eps * delta_omega * delta_omega))
}

/// Slow-envelope rate matrix `[[a_aa, a_ab], [a_ba, a_bb]]` of the loop (units 1/s).
pub fn discrete_reduction_coefficients(eta: f64, mu: f64, g: f64, tau: f64) -> [[f64; 2]; 2] {
    let c = (1.0 - eta).sqrt();
    let amp = (1.0 + g).sqrt();
    let m = mu.sqrt();
    let mp = (1.0 - mu).sqrt();
    [
        [(mp * c - 1.0) / tau, m * amp / tau],
        [-m * c / tau, (mp * amp - 1.0) / tau],
    ]
}

/// Frequency noise `eta^2 (1 + 2n) / (4 (1 - eta)(2 - eta)^2 tau^2 |alpha|^2 eps)`.
pub fn freq_noise_nonmarkovian(p: &LoopParams, alpha: f64) -> Result<f64> {
    p.check()?;
    if !(alpha > 0.0) {
        return Err(Error::NoCarrier(format!("carrier amplitude must be > 0 (got {alpha})")));
    }
    let (e, t) = (p.eta, p.tau);
    Ok(e * e * (1.0 + 2.0 * p.n_th) / (4.0 * (1.0 - e) * (2.0 - e).powi(2) * t * t * alpha * alpha * p.eps))
}
