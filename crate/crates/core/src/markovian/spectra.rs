//! Output quadrature spectra and frequency-noise spectra of the Markovian sensors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mean_field::MeanField;
use crate::params::{PassiveParams, PtParams, Validate};
use crate::spectrum::{pole_guard, Grid, Quadrature, Spectrum, POLE_TOLERANCE};

use super::transfer::{passive_gains, pt_gains};

/// `|H_a|^2 S_a + |H_b|^2 S_b + 2 Re[H_a conj(H_b) S_ab]` on `grid`.
pub fn passive_output_spectrum(
    p: &PassiveParams,
    s_a: &[f64],
    s_b: &[f64],
    s_ab: &[Complex64],
    grid: &Grid,
) -> Result<Spectrum> {
    p.check()?;
    let n = grid.len();
    if s_a.len() != n || s_b.len() != n || s_ab.len() != n {
        return Err(Error::Shape(format!(
            "input spectra have {}, {}, {} points but the grid has {n}",
            s_a.len(),
            s_b.len(),
            s_ab.len()
        )));
    }
    let values = grid
        .points()
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            let (ha, hb) = passive_gains(p.gamma_a, p.gamma_b, p.eps, (w - p.omega0).into());
            ha.norm_sqr() * s_a[k] + hb.norm_sqr() * s_b[k] + 2.0 * (ha * hb.conj() * s_ab[k]).re
        })
        .collect();
    Spectrum::new(grid.points().to_vec(), values)
}

/// Output spectrum of the passive sensor with independent thermal inputs at `n_a`, `n_b`.
pub fn passive_thermal_spectrum(p: &PassiveParams, grid: &Grid) -> Result<Spectrum> {
    let n = grid.len();
    passive_output_spectrum(
        p,
        &vec![0.5 + p.n_a; n],
        &vec![0.5 + p.n_b; n],
        &vec![Complex64::new(0.0, 0.0); n],
        grid,
    )
}

/// Exact noise spectrum of either output quadrature at complex detuning `z`.
pub fn pt_spectrum_at(gamma: f64, eps: f64, n_in: f64, n_amp: f64, z: Complex64) -> f64 {
    let g = pt_gains(gamma, eps, z, Quadrature::P, None);
    g.h_in.norm_sqr() * (0.5 + n_in) + g.h_amp.norm_sqr() * (0.5 + n_amp)
}

/// Exact output spectrum of quadrature `x`; both quadratures have the same noise spectrum.
pub fn pt_output_spectrum_exact(p: &PtParams, grid: &Grid, x: Quadrature) -> Result<Spectrum> {
    p.check()?;
    let poles = p.resonances();
    let values = grid
        .points()
        .iter()
        .map(|&w| {
            pole_guard(w, &poles, POLE_TOLERANCE * p.gamma)?;
            let g = pt_gains(p.gamma, p.eps_bar, (w - p.omega0).into(), x, None);
            Ok(g.h_in.norm_sqr() * (0.5 + p.n_in) + g.h_amp.norm_sqr() * (0.5 + p.n_amp))
        })
        .collect::<Result<Vec<_>>>()?;
    Spectrum::new(grid.points().to_vec(), values)
}

/// Near-resonance phase spectrum `gamma^2 (1 + 2 n) / (2 eps delta_omega^2)` at offset
/// `delta_omega` from either resonance.
pub fn pt_output_spectrum_near_resonance(p: &PtParams, delta_omega: f64) -> Result<f64> {
    p.check()?;
    if delta_omega == 0.0 {
        return Err(Error::Divergence(
            "near-resonance spectrum diverges at zero offset".into(),
        ));
    }
    Ok(p.gamma * p.gamma * (1.0 + 2.0 * p.n_th()) / (2.0 * p.eps_bar * delta_omega * delta_omega))
}

/// Frequency-noise spectrum `delta_omega^2 / (4 gamma |a|^2) S_pp` from the output phase spectrum.
pub fn frequency_noise_spectrum(s_pp: f64, delta_omega: f64, gamma: f64, a_amp: f64) -> Result<f64> {
    if !(a_amp > 0.0) {
        return Err(Error::NoCarrier(format!("carrier amplitude must be > 0 (got {a_amp})")));
    }
    Ok(delta_omega * delta_omega / (4.0 * gamma * a_amp * a_amp) * s_pp)
}

/// Closed-form frequency noise `gamma (1 + 2 n) / (8 |a|^2 eps)`.
pub fn pt_frequency_noise(p: &PtParams, a_amp: f64) -> Result<f64> {
    p.check()?;
    if !(a_amp > 0.0) {
        return Err(Error::NoCarrier(format!("carrier amplitude must be > 0 (got {a_amp})")));
    }
    Ok(p.gamma * (1.0 + 2.0 * p.n_th()) / (8.0 * a_amp * a_amp * p.eps_bar))
}

/// Near-EP, near-resonance spectrum of quadrature `x` with a stationary `delta eps` of PSD
/// `s_eps(baseband frequency)`:
/// `4 gamma^4 [(1 + 2n) + 2 gamma (|x_-|^2 + |x_+|^2) S_eps(omega - omega0)] / D^2`.
pub fn weak_force_output_spectrum(
    p: &PtParams,
    mean: &MeanField,
    s_eps: &dyn Fn(f64) -> f64,
    grid: &Grid,
    x: Quadrature,
) -> Result<Spectrum> {
    p.check()?;
    let c = mean.quadrature(x);
    let carrier = c.a_minus.norm_sqr() + c.a_plus.norm_sqr();
    let [wm, wp] = p.resonances();
    let g4 = 4.0 * p.gamma.powi(4);
    let values = grid
        .points()
        .iter()
        .map(|&w| {
            pole_guard(w, &[wm, wp], POLE_TOLERANCE * p.gamma)?;
            let d = (w - wm) * (w - wp);
            let signal = 2.0 * p.gamma * carrier * s_eps(w - p.omega0);
            Ok(g4 * ((1.0 + 2.0 * p.n_th()) + signal) / (d * d))
        })
        .collect::<Result<Vec<_>>>()?;
    Spectrum::new(grid.points().to_vec(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(eps: f64) -> PtParams {
        PtParams::new(0.0, 1.0, eps, 0.0, 0.0).unwrap()
    }

    #[test]
    fn off_resonance_is_bare_reflection() {
        let p = PtParams::new(2.0, 1.0, 0.01, 0.3, 0.2).unwrap();
        let s = pt_output_spectrum_exact(&p, &Grid::new(vec![2.0 + 1e7]).unwrap(), Quadrature::P).unwrap();
        assert!((s.values[0] - 0.8).abs() < 1e-6);
    }

    #[test]
    fn symmetric_about_omega0() {
        let p = PtParams::new(3.0, 1.0, 0.01, 0.1, 0.4).unwrap();
        for &d in &[1e-3, 0.05, 0.2, 3.0] {
            let g = Grid::new(vec![3.0 - d, 3.0 + d]).unwrap();
            let s = pt_output_spectrum_exact(&p, &g, Quadrature::P).unwrap();
            assert!((s.values[0] / s.values[1] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn near_resonance_scalings() {
        let v = pt_output_spectrum_near_resonance(&pt(1e-2), 1e-3).unwrap();
        assert!((v / 5e7 - 1.0).abs() < 1e-12);
        let hot = PtParams::new(0.0, 1.0, 1e-2, 0.5, 0.5).unwrap();
        assert!((pt_output_spectrum_near_resonance(&hot, 1e-3).unwrap() / v - 2.0).abs() < 1e-12);
        let tenth = pt_output_spectrum_near_resonance(&pt(1e-3), 1e-3).unwrap();
        assert!((tenth / v - 10.0).abs() < 1e-12);
        assert!(matches!(
            pt_output_spectrum_near_resonance(&pt(1e-2), 0.0),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn frequency_noise_chain() {
        let p = pt(0.01);
        for &d in &[1e-3, 1e-4] {
            let spp = pt_output_spectrum_near_resonance(&p, d).unwrap();
            let f = frequency_noise_spectrum(spp, d, 1.0, 1.0).unwrap();
            assert!((f / 12.5 - 1.0).abs() < 1e-12);
        }
        let f1 = frequency_noise_spectrum(3.0, 0.1, 1.0, 1.0).unwrap();
        let f2 = frequency_noise_spectrum(3.0, 0.1, 1.0, 2.0).unwrap();
        assert!((f1 / f2 - 4.0).abs() < 1e-15);
        assert!(matches!(
            frequency_noise_spectrum(1.0, 1.0, 1.0, 0.0),
            Err(Error::NoCarrier(_))
        ));
        assert!((pt_frequency_noise(&p, 1.0).unwrap() - 12.5).abs() < 1e-12);
    }

    #[test]
    fn passive_single_channel() {
        let p = PassiveParams::new(0.0, 2.0, 1.0, 0.1, 0.0, 0.0).unwrap();
        let g = Grid::linear(-3.0, 3.0, 7).unwrap();
        let s = passive_output_spectrum(&p, &[0.7; 7], &[0.0; 7], &[Complex64::new(0.0, 0.0); 7], &g).unwrap();
        for (k, &w) in g.points().iter().enumerate() {
            let (ha, _) = passive_gains(2.0, 1.0, 0.1, w.into());
            assert!((s.values[k] - 0.7 * ha.norm_sqr()).abs() < 1e-15);
        }
        assert!(matches!(
            passive_output_spectrum(&p, &[0.7; 6], &[0.0; 7], &[Complex64::new(0.0, 0.0); 7], &g),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn passive_vacuum_stays_at_vacuum() {
        let p = PassiveParams::new(0.0, 2.0, 0.3, 0.05, 0.0, 0.0).unwrap();
        let s = passive_thermal_spectrum(&p, &Grid::linear(-5.0, 5.0, 101).unwrap()).unwrap();
        assert!(s.values.iter().all(|v| (v - 0.5).abs() < 1e-14));
    }

    #[test]
    fn weak_force_without_signal_is_noise_only() {
        let p = pt(1e-3);
        let m = MeanField::from_carriers(1.0, 1e-3, 1.0.into(), 1.0.into());
        let s = p.half_splitting();
        let g = Grid::new(vec![s + 1e-6, s + 2e-6]).unwrap();
        let w = weak_force_output_spectrum(&p, &m, &|_| 0.0, &g, Quadrature::Q).unwrap();
        for (k, &d) in [1e-6, 2e-6].iter().enumerate() {
            let near = pt_output_spectrum_near_resonance(&p, d).unwrap();
            assert!((w.values[k] / near - 1.0).abs() < 2e-3);
        }
    }
}
