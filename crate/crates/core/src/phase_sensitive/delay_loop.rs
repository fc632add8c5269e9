//! Delay-loop phase-sensitive sensor: the loop amplifier is followed by a squeezer that scales
//! `q` by `e^xi` and `p` by `e^-xi`, with `e^xi sqrt(1 + G) sqrt(1 - eta) = 1` so the amplitude
//! quadrature keeps the phase-insensitive loop dynamics.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::loop_model::{calibrate_loop, cos_difference, loop_gains, wrap_phase};
use crate::params::{PsLoopParams, Validate};
use crate::spectrum::{pole_guard, Channel, Grid, Quadrature, Spectrum, TransferFunctionSet, POLE_TOLERANCE};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Gains `(H_in, H_amp)` of quadrature `x` at complex round-trip detuning `phi`, with `gain`
/// the calibrated phase-insensitive power gain.
pub fn ps_loop_gains(eta: f64, eps: f64, xi: f64, gain: f64, phi: Complex64, x: Quadrature) -> (Complex64, Complex64) {
    let (h_in, h_amp) = loop_gains(eta, eps, phi);
    match x {
        Quadrature::Q => {
            let pre = (1.0 / eta - (2.0 * xi).exp() * (1.0 / eta - 1.0)).max(0.0).sqrt();
            (h_in, pre * h_amp)
        }
        Quadrature::P => {
            let th = 0.5 * eta * (eps * (2.0 + eps)).sqrt();
            let c = (1.0 - eta).sqrt();
            let mu = calibrate_loop(eta, eps).map(|k| k.mu).unwrap_or(f64::NAN);
            let (ch, sh) = (xi.cosh(), xi.sinh());
            let dc = cos_difference(phi, th);
            let (cp, sp) = (phi.cos(), phi.sin());
            let d = 2.0 * (ch * dc - I * sh * sp + eta * th.cos() * sh / (2.0 - eta));
            let num = (4.0 * (1.0 - eta) * ch * dc + eta * eta * ch * cp - eta * (2.0 - eta) * sh * cp) / (2.0 - eta)
                + I * (-(2.0 - eta) * sh + eta * ch) * sp;
            (num / (c * d), -(eta * gain * mu).sqrt() / d)
        }
    }
}

fn round_trip_phase(p: &PsLoopParams, w: f64, poles: &[f64]) -> Result<f64> {
    let phi = wrap_phase((w - p.omega0) * p.tau);
    pole_guard(phi, poles, POLE_TOLERANCE).map_err(|e| match e {
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

fn quadrature_tf(p: &PsLoopParams, grid: &Grid, x: Quadrature, gain: f64) -> Result<TransferFunctionSet> {
    let th = p.as_loop().theta();
    // The phase quadrature is damped for any squeezing.
    let poles: &[f64] = if x == Quadrature::Q || p.xi == 0.0 {
        &[-th, th]
    } else {
        &[]
    };
    let mut hin = Vec::with_capacity(grid.len());
    let mut hamp = Vec::with_capacity(grid.len());
    for &w in grid.points() {
        let phi = round_trip_phase(p, w, poles)?;
        let (a, b) = ps_loop_gains(p.eta, p.eps, p.xi, gain, phi.into(), x);
        hin.push(a);
        hamp.push(b);
    }
    Ok(TransferFunctionSet {
        grid: grid.points().to_vec(),
        quadrature: Some(x),
        channels: vec![(Channel::In, hin), (Channel::Amp, hamp)],
    })
}

/// Transfer functions of the amplitude and phase quadratures, in that order.
pub fn ps_nonmarkovian_quadrature_tfs(
    p: &PsLoopParams,
    grid: &Grid,
) -> Result<(TransferFunctionSet, TransferFunctionSet)> {
    p.check()?;
    p.as_loop().check_commensurate()?;
    let gain = p.calibrated_gain()?;
    Ok((
        quadrature_tf(p, grid, Quadrature::Q, gain)?,
        quadrature_tf(p, grid, Quadrature::P, gain)?,
    ))
}

/// `(|H_in^p|^2 + |H_amp^p|^2)(1/2 + n)`.
pub fn ps_nonmarkovian_phase_spectrum(p: &PsLoopParams, grid: &Grid) -> Result<Spectrum> {
    let (_, tp) = ps_nonmarkovian_quadrature_tfs(p, grid)?;
    let n = 0.5 + p.n_th;
    tp.noise_spectrum(&[(Channel::In, n), (Channel::Amp, n)])
}

/// Near-resonance phase spectrum for `xi > 0`:
/// `[eta (e^{-2 xi} + eta - 1) csch^2 xi + (2 - eta (1 + coth xi))^2] (1 + 2n) / (8 (1 - eta))`.
pub fn ps_loop_near_resonance(p: &PsLoopParams) -> Result<f64> {
    p.check()?;
    p.calibrated_gain()?;
    if p.xi == 0.0 {
        return Err(Error::Divergence(
            "phase spectrum diverges near resonance for xi = 0".into(),
        ));
    }
    let (e, xi) = (p.eta, p.xi);
    let csch = 1.0 / xi.sinh();
    let coth = 1.0 / xi.tanh();
    let lead = e * ((-2.0 * xi).exp_m1() + e) * csch * csch;
    let tail = 2.0 - e * (1.0 + coth);
    Ok((lead + tail * tail) * (1.0 + 2.0 * p.n_th) / (8.0 * (1.0 - e)))
}

/// Purely phase-sensitive loop: `(1 - eta)(2 - eta)^2 eps tau^2 dw^2 (1 + 2n) / eta^2`.
pub fn ps_loop_pure_near_resonance(eta: f64, tau: f64, eps: f64, n_th: f64, delta_omega: f64) -> f64 {
    (1.0 - eta) * (2.0 - eta).powi(2) * eps * tau * tau * delta_omega * delta_omega * (1.0 + 2.0 * n_th) / (eta * eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loop_model::calibrate_loop;

    /// Solves one round trip of the quadrature loop in the frequency domain: a delayed sample
    /// picks up `u = e^{i phi}`.
    fn solve(eta: f64, eps: f64, xi: f64, phi: f64, x: Quadrature) -> (Complex64, Complex64) {
        let mu = calibrate_loop(eta, eps).unwrap().mu;
        let g = ((-2.0 * xi).exp_m1() + eta).max(0.0) / (1.0 - eta);
        let c = (1.0 - eta).sqrt();
        let (s, sign) = match x {
            Quadrature::Q => (xi.exp(), 1.0),
            Quadrature::P => ((-xi).exp(), -1.0),
        };
        let u = Complex64::from_polar(1.0, phi);
        let (m, mp, se) = (mu.sqrt(), (1.0 - mu).sqrt(), eta.sqrt());
        // a = m bs - mp a0, b = m a0 + mp bs with a0 = se a_in - c u a, bs = s (sqrt(1+G) u b + sign sqrt(G) f)
        let k = s * (1.0 + g).sqrt() * u;
        // rows: [a, b] coefficients; columns of rhs: a_in, f
        let m11 = 1.0 - mp * c * u;
        let m12 = -m * k;
        let m21 = m * c * u;
        let m22 = 1.0 - mp * k;
        let det = m11 * m22 - m12 * m21;
        let sol = |r1: Complex64, r2: Complex64| (m22 * r1 - m12 * r2) / det;
        let fa = s * sign * g.sqrt();
        let a_from_in = sol(-mp * se + 0.0 * I, m * se + 0.0 * I);
        let a_from_f = sol(m * fa + 0.0 * I, mp * fa + 0.0 * I);
        (se * u * a_from_in + c, se * u * a_from_f)
    }

    #[test]
    fn matches_round_trip_solve() {
        for &(eta, eps) in &[(0.1, 0.02), (0.3, 0.5), (1e-3, 1e-2)] {
            let pure = PsLoopParams::pure_xi(eta);
            for &xi in &[0.0, 0.3 * pure, pure] {
                let g = ((-2.0 * xi).exp_m1() + eta).max(0.0) / (1.0 - eta);
                for &phi in &[0.37, -1.2, 2.9, 1e-4] {
                    for x in [Quadrature::Q, Quadrature::P] {
                        let (a, b) = ps_loop_gains(eta, eps, xi, g, phi.into(), x);
                        let (ea, eb) = solve(eta, eps, xi, phi, x);
                        assert!((a - ea).norm() < 1e-8 * ea.norm(), "{x:?} {eta} {xi} {phi}: {a} {ea}");
                        assert!(
                            (b - eb).norm() < 1e-8 * eb.norm().max(1e-12),
                            "{x:?} {eta} {xi} {phi}: {b} {eb}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn xi_zero_recovers_phase_insensitive_loop() {
        let (eta, eps) = (0.05, 0.03);
        let g = eta / (1.0 - eta);
        for &phi in &[0.2, -0.9, 1.7, 2.5, -3.0] {
            let (a, b) = loop_gains(eta, eps, phi.into());
            let (pa, pb) = ps_loop_gains(eta, eps, 0.0, g, phi.into(), Quadrature::P);
            assert!((a - pa).norm() < 1e-12 * a.norm());
            assert!((b + pb).norm() < 1e-12 * b.norm());
        }
    }

    #[test]
    fn pure_amplitude_prefactor() {
        let eta = 0.1;
        let xi = PsLoopParams::pure_xi(eta);
        let pre: f64 = 1.0 / eta - (2.0 * xi).exp() * (1.0 / eta - 1.0);
        assert!((pre - (1.0 / eta - (1.0 / eta - 1.0) / (1.0 - eta))).abs() < 1e-12);
        assert!(pre.abs() < 1e-12);
    }

    #[test]
    fn near_resonance_form_matches_exact() {
        let tau = 1e-3;
        let eta = 2.0 * tau;
        let p = PsLoopParams::new(eta, tau, 0.01, 0.0, 0.5 * tau, 0.0).unwrap();
        let res = p.as_loop().theta() / tau;
        let g = Grid::new(vec![res + 1e-6]).unwrap();
        let exact = ps_nonmarkovian_phase_spectrum(&p, &g).unwrap().values[0];
        let near = ps_loop_near_resonance(&p).unwrap();
        assert!((exact / near - 1.0).abs() < 1e-6, "{exact} {near}");
        // Markovian reduction with gamma_a = 1, r = 0.5, gamma_b = 0
        assert!((near / 1.5 - 1.0).abs() < 5e-3, "{near}");
    }

    #[test]
    fn pure_form_matches_exact() {
        let (eta, tau, eps) = (0.01, 0.005, 0.01);
        let mut p = PsLoopParams::new(eta, tau, eps, 0.0, PsLoopParams::pure_xi(eta), 0.0).unwrap();
        p.gain = None;
        let res = p.as_loop().theta() / tau;
        for &dw in &[1e-3, 3e-3] {
            let exact = ps_nonmarkovian_phase_spectrum(&p, &Grid::new(vec![res + dw]).unwrap())
                .unwrap()
                .values[0];
            let near = ps_loop_pure_near_resonance(eta, tau, eps, 0.0, dw);
            assert!((exact / near - 1.0).abs() < 2e-2, "{dw} {exact} {near}");
        }
    }
}
