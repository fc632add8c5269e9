use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::mean_field::PsMeanField;
use crate::params::{PhaseSensitiveParams, Validate};
use crate::spectrum::{pole_guard, Channel, Grid, Quadrature, Spectrum, TransferFunctionSet, POLE_TOLERANCE};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigenvalues (rates, `x ~ e^{lambda t}`) of the amplitude- and phase-quadrature blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEigenSet {
    pub amplitude_pair: [Complex64; 2],
    pub phase_pair: [Complex64; 2],
}

/// Rate matrix of the amplitude (`r = 0` in the `b` entry) or phase quadratures of `(a, b)`.
pub fn quadrature_block(p: &PhaseSensitiveParams, x: Quadrature) -> Mat2 {
    let ga = p.gamma_a;
    let k = ga * (1.0 + p.eps_bar);
    let bb = match x {
        Quadrature::Q => ga,
        Quadrature::P => ga - 2.0 * p.r,
    };
    Mat2::real(-ga, k, -k, bb)
}

/// Amplitude pair `+- i gamma_a sqrt(eps (2 + eps))`; phase pair
/// `-r +- i sqrt((r + eps gamma_a)(gamma_a (2 + eps) - r))`.
pub fn ps_quadrature_eigenvalues(p: &PhaseSensitiveParams) -> Result<QuadratureEigenSet> {
    p.check()?;
    let s = p.half_splitting();
    let w = ((p.r + p.eps_bar * p.gamma_a) * (p.gamma_a * (2.0 + p.eps_bar) - p.r))
        .max(0.0)
        .sqrt();
    Ok(QuadratureEigenSet {
        amplitude_pair: [Complex64::new(0.0, -s), Complex64::new(0.0, s)],
        phase_pair: [Complex64::new(-p.r, -w), Complex64::new(-p.r, w)],
    })
}

/// Gains `(H_in, H_amp, H_b_in)` of output quadrature `x` at complex detuning `z`.
pub fn ps_gains(p: &PhaseSensitiveParams, z: Complex64, x: Quadrature) -> (Complex64, Complex64, Complex64) {
    let ga = p.gamma_a;
    let s2 = ga * ga * p.eps_bar * (2.0 + p.eps_bar);
    let r = if x == Quadrature::P { p.r } else { 0.0 };
    let d = z * z - s2 + 2.0 * I * r * z - 2.0 * r * ga;
    let pre = 2.0 * (1.0 + p.eps_bar) * ga.powf(1.5);
    let amp_sign = if x == Quadrature::P { 1.0 } else { -1.0 };
    (
        2.0 * ga * (ga - 2.0 * r + I * z) / d - 1.0,
        amp_sign * pre * p.gamma_amp().sqrt() / d,
        -pre * p.gamma_b.sqrt() / d,
    )
}

fn real_poles(p: &PhaseSensitiveParams, x: Quadrature) -> Vec<f64> {
    if x == Quadrature::Q || p.r == 0.0 {
        p.resonances().to_vec()
    } else {
        Vec::new()
    }
}

pub fn ps_transfer_functions(p: &PhaseSensitiveParams, grid: &Grid, x: Quadrature) -> Result<TransferFunctionSet> {
    p.check()?;
    let poles = real_poles(p, x);
    let mut cols: [Vec<Complex64>; 3] = Default::default();
    for &w in grid.points() {
        pole_guard(w, &poles, POLE_TOLERANCE * p.gamma_a)?;
        let (a, b, c) = ps_gains(p, (w - p.omega0).into(), x);
        for (col, v) in cols.iter_mut().zip([a, b, c]) {
            col.push(v);
        }
    }
    let [hin, hamp, hb] = cols;
    Ok(TransferFunctionSet {
        grid: grid.points().to_vec(),
        quadrature: Some(x),
        channels: vec![(Channel::In, hin), (Channel::Amp, hamp), (Channel::BIn, hb)],
    })
}

pub fn ps_phase_transfer_functions(p: &PhaseSensitiveParams, grid: &Grid) -> Result<TransferFunctionSet> {
    ps_transfer_functions(p, grid, Quadrature::P)
}

/// `sum |H|^2 (1/2 + n)` over the three noise channels of quadrature `x`.
pub fn ps_output_spectrum(p: &PhaseSensitiveParams, grid: &Grid, x: Quadrature) -> Result<Spectrum> {
    let n = 0.5 + p.n_th;
    ps_transfer_functions(p, grid, x)?.noise_spectrum(&[(Channel::In, n), (Channel::Amp, n), (Channel::BIn, n)])
}

pub fn ps_output_phase_spectrum(p: &PhaseSensitiveParams, grid: &Grid) -> Result<Spectrum> {
    ps_output_spectrum(p, grid, Quadrature::P)
}

/// Spectrum of the lab quadrature at `angle` from the `q` axis; the pump phase rotates the
/// amplified axis, and the two pump-aligned quadratures are uncorrelated.
pub fn ps_rotated_quadrature_spectrum(p: &PhaseSensitiveParams, grid: &Grid, angle: f64) -> Result<Spectrum> {
    let q = ps_output_spectrum(p, grid, Quadrature::Q)?;
    let ps = ps_output_spectrum(p, grid, Quadrature::P)?;
    let (s, c) = (angle - p.pump_phase).sin_cos();
    let values = q
        .values
        .iter()
        .zip(&ps.values)
        .map(|(a, b)| c * c * a + s * s * b)
        .collect();
    Spectrum::new(q.grid, values)
}

/// Near-resonance phase spectrum with loss, `(2 ga^2 + 2 ga gb - 3 ga r + r^2)(1 + 2n) / (2 r^2)`.
pub fn ps_lossy_near_resonance(p: &PhaseSensitiveParams) -> Result<f64> {
    p.check()?;
    if p.r == 0.0 {
        return Err(Error::Divergence(
            "phase spectrum diverges near resonance for r = 0".into(),
        ));
    }
    let (ga, gb, r) = (p.gamma_a, p.gamma_b, p.r);
    Ok((2.0 * ga * ga + 2.0 * ga * gb - 3.0 * ga * r + r * r) * (1.0 + 2.0 * p.n_th) / (2.0 * r * r))
}

/// Purely phase-sensitive gain (`r = gamma_a + gamma_b`): `gamma_b (1 + 2n) / (2 (gamma_a + gamma_b))`.
pub fn ps_balanced_near_resonance(gamma_a: f64, gamma_b: f64, n_th: f64) -> f64 {
    gamma_b * (1.0 + 2.0 * n_th) / (2.0 * (gamma_a + gamma_b))
}

/// Lossless purely phase-sensitive sensor: `eps (2 + eps)(1 + 2n) dw^2 / (2 ga^2 (1 + eps)^2)`.
pub fn ps_pure_near_resonance(p: &PhaseSensitiveParams, delta_omega: f64) -> Result<f64> {
    p.check()?;
    let (e, ga) = (p.eps_bar, p.gamma_a);
    Ok(e * (2.0 + e) * (1.0 + 2.0 * p.n_th) * delta_omega * delta_omega / (2.0 * ga * ga * (1.0 + e) * (1.0 + e)))
}

/// Imprecision `N / S` of the purely phase-sensitive sensor: the flat phase spectrum
/// (`r = gamma_a + gamma_b`) converted to frequency noise at offset `delta_omega` with flux
/// `N = 4 gamma_a |q0|^2`, integrated over `delta_omega_meas` for both resonances.
pub fn ps_imprecision(
    p: &PhaseSensitiveParams,
    mean: &PsMeanField,
    delta_omega: f64,
    delta_omega_meas: f64,
) -> Result<f64> {
    p.check()?;
    let flux = mean.flux();
    if !(flux > 0.0) {
        return Err(Error::NoCarrier("phase-sensitive carrier q0 is zero".into()));
    }
    let s_pp = ps_balanced_near_resonance(p.gamma_a, p.gamma_b, p.n_th);
    let s_freq = delta_omega * delta_omega / (2.0 * flux) * s_pp;
    let noise = (2.0 * s_freq * delta_omega_meas / (2.0 * std::f64::consts::PI)).sqrt();
    let e = p.eps_bar;
    let sensitivity = 2.0 * p.gamma_a * (1.0 + e) / (e * (2.0 + e)).sqrt();
    Ok(noise / sensitivity)
}
