//! Sensitivity, noise, and imprecision of parameter estimation from the mode splitting.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::markovian::{frequency_noise_spectrum, pt_eigenfrequencies, pt_frequency_noise, pt_output_spectrum_exact};
use crate::mean_field::MeanField;
use crate::params::{PtParams, Validate};
use crate::spectrum::{Grid, Quadrature};

pub const SENSITIVITY_EXACT: &str = "sensitivity.exact_derivative";
pub const SENSITIVITY_LEADING: &str = "sensitivity.leading_order";
pub const NOISE_NEAR_RESONANCE: &str = "noise.near_resonance_frequency_noise";
pub const NOISE_EXACT: &str = "noise.exact_spectrum_chain";
pub const IMPRECISION_RATIO: &str = "imprecision.noise_over_sensitivity";
pub const IMPRECISION_CLOSED_FORM: &str = "imprecision.closed_form";
pub const IMPRECISION_TECHNICAL: &str = "imprecision.technical_noise";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImprecisionReport {
    /// `|d(Omega_+ - Omega_-)/d eps|` (rad/s).
    pub sensitivity: f64,
    /// Frequency noise integrated over `delta_omega_meas` (rad/s).
    pub noise: f64,
    /// `noise / sensitivity`.
    pub imprecision: f64,
    /// Leading-order closed form `sqrt((1 + 2n) dw_meas / (16 pi gamma |a|^2))`.
    pub closed_form: f64,
    pub delta_omega_meas: f64,
    pub sensitivity_formula: &'static str,
    pub noise_formula: &'static str,
    pub imprecision_formula: &'static str,
    pub closed_form_formula: &'static str,
}

/// `2 gamma (1 + eps) / sqrt(eps (2 + eps))`.
pub fn sensitivity(gamma: f64, eps_bar: f64) -> Result<f64> {
    if eps_bar == 0.0 {
        return Err(Error::Divergence(
            "sensitivity diverges at the exceptional point".into(),
        ));
    }
    if !(eps_bar > 0.0) || !(gamma > 0.0) {
        return Err(Error::Domain(format!(
            "need gamma > 0 and eps_bar > 0 (got {gamma}, {eps_bar})"
        )));
    }
    Ok(2.0 * gamma * (1.0 + eps_bar) / (eps_bar * (2.0 + eps_bar)).sqrt())
}

/// Small-perturbation asymptote `sqrt(2) gamma / sqrt(eps)`.
pub fn sensitivity_leading_order(gamma: f64, eps_bar: f64) -> Result<f64> {
    sensitivity(gamma, eps_bar)?;
    Ok(std::f64::consts::SQRT_2 * gamma / eps_bar.sqrt())
}

/// `sqrt((S_+ + S_-) dw_meas / (2 pi))`.
pub fn noise_level(freq_noise_at_plus: f64, freq_noise_at_minus: f64, delta_omega_meas: f64) -> Result<f64> {
    if !(freq_noise_at_plus >= 0.0 && freq_noise_at_minus >= 0.0 && delta_omega_meas >= 0.0) {
        return Err(Error::Domain("noise spectra and bandwidth must be >= 0".into()));
    }
    Ok(((freq_noise_at_plus + freq_noise_at_minus) * delta_omega_meas / (2.0 * PI)).sqrt())
}

fn carriers(mean: &MeanField) -> Result<(f64, f64)> {
    let (ap, am) = (mean.a_plus.norm(), mean.a_minus.norm());
    if !(ap > 0.0 && am > 0.0) {
        return Err(Error::NoCarrier(format!(
            "both resonances need a carrier (|a_+| = {ap}, |a_-| = {am})"
        )));
    }
    Ok((ap, am))
}

/// Closed form with `|a|^2` the harmonic mean of the two carrier powers.
fn closed_form(p: &PtParams, ap: f64, am: f64, delta_omega_meas: f64) -> f64 {
    let inv = 0.5 * (1.0 / (ap * ap) + 1.0 / (am * am));
    ((1.0 + 2.0 * p.n_th()) * delta_omega_meas * inv / (16.0 * PI * p.gamma)).sqrt()
}

/// Imprecision from the near-resonance frequency noise of both carriers and the exact sensitivity.
pub fn imprecision(p: &PtParams, mean: &MeanField, delta_omega_meas: f64) -> Result<ImprecisionReport> {
    near_resonance_report(
        p,
        mean,
        delta_omega_meas,
        sensitivity(p.gamma, p.eps_bar)?,
        SENSITIVITY_EXACT,
    )
}

/// Same chain with every factor at leading order in `eps`.
pub fn imprecision_leading_order(p: &PtParams, mean: &MeanField, delta_omega_meas: f64) -> Result<ImprecisionReport> {
    let s = sensitivity_leading_order(p.gamma, p.eps_bar)?;
    near_resonance_report(p, mean, delta_omega_meas, s, SENSITIVITY_LEADING)
}

fn near_resonance_report(
    p: &PtParams,
    mean: &MeanField,
    delta_omega_meas: f64,
    s: f64,
    sensitivity_formula: &'static str,
) -> Result<ImprecisionReport> {
    p.check()?;
    let (ap, am) = carriers(mean)?;
    let n = noise_level(pt_frequency_noise(p, ap)?, pt_frequency_noise(p, am)?, delta_omega_meas)?;
    Ok(ImprecisionReport {
        sensitivity: s,
        noise: n,
        imprecision: n / s,
        closed_form: closed_form(p, ap, am, delta_omega_meas),
        delta_omega_meas,
        sensitivity_formula,
        noise_formula: NOISE_NEAR_RESONANCE,
        imprecision_formula: IMPRECISION_RATIO,
        closed_form_formula: IMPRECISION_CLOSED_FORM,
    })
}

/// Imprecision from the exact output spectrum sampled `offset` above each exact resonance,
/// converted to frequency noise.
pub fn imprecision_exact(
    p: &PtParams,
    mean: &MeanField,
    delta_omega_meas: f64,
    offset: f64,
) -> Result<ImprecisionReport> {
    p.check()?;
    let (ap, am) = carriers(mean)?;
    if !(offset > 0.0) {
        return Err(Error::Domain(format!("offset must be > 0 (got {offset})")));
    }
    let e = pt_eigenfrequencies(p)?;
    let at = |res: f64, a: f64| -> Result<f64> {
        let s_pp = pt_output_spectrum_exact(p, &Grid::new(vec![res + offset])?, Quadrature::P)?.values[0];
        frequency_noise_spectrum(s_pp, offset, p.gamma, a)
    };
    let s = sensitivity(p.gamma, p.eps_bar)?;
    let n = noise_level(at(e.omega_plus.re, ap)?, at(e.omega_minus.re, am)?, delta_omega_meas)?;
    Ok(ImprecisionReport {
        sensitivity: s,
        noise: n,
        imprecision: n / s,
        closed_form: closed_form(p, ap, am, delta_omega_meas),
        delta_omega_meas,
        sensitivity_formula: SENSITIVITY_EXACT,
        noise_formula: NOISE_EXACT,
        imprecision_formula: IMPRECISION_RATIO,
        closed_form_formula: IMPRECISION_CLOSED_FORM,
    })
}

/// `sqrt((S_fund + S_tech) / (2 gamma^2 / eps))`, with no bandwidth factor.
pub fn technical_imprecision(s_fund: f64, s_tech: f64, gamma: f64, eps_bar: f64) -> Result<f64> {
    if !(s_fund >= 0.0 && s_tech >= 0.0) {
        return Err(Error::Domain("noise spectra must be >= 0".into()));
    }
    if !(gamma > 0.0 && eps_bar > 0.0) {
        return Err(Error::Domain(format!(
            "need gamma > 0 and eps_bar > 0 (got {gamma}, {eps_bar})"
        )));
    }
    Ok(((s_fund + s_tech) * eps_bar / (2.0 * gamma * gamma)).sqrt())
}

/// Perturbation at which the fundamental frequency noise equals `s_tech`:
/// `gamma (1 + 2n) / (8 |a|^2 S_tech)`.
pub fn crossover_epsilon(s_tech: f64, gamma: f64, a_amp: f64, n_th: f64) -> Result<f64> {
    if !(s_tech > 0.0) {
        return Err(Error::Domain(format!("S_tech must be > 0 (got {s_tech})")));
    }
    if !(a_amp > 0.0) {
        return Err(Error::NoCarrier(format!("carrier amplitude must be > 0 (got {a_amp})")));
    }
    Ok(gamma * (1.0 + 2.0 * n_th) / (8.0 * a_amp * a_amp * s_tech))
}

/// Ratio of the transduced perturbation to the noise floor near resonance,
/// `2 gamma (|x_-|^2 + |x_+|^2) S_eps / (1 + 2n)`, for output quadrature `x`.
pub fn weak_force_snr(p: &PtParams, mean: &MeanField, x: Quadrature, s_eps: f64) -> Result<f64> {
    p.check()?;
    if !mean.has_carrier() {
        return Err(Error::NoCarrier("weak-force transduction needs a carrier".into()));
    }
    let c = mean.quadrature(x);
    Ok(2.0 * p.gamma * (c.a_minus.norm_sqr() + c.a_plus.norm_sqr()) * s_eps / (1.0 + 2.0 * p.n_th()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markovian::pt_eigenfrequencies;
    use num_complex::Complex64;

    fn unit(p: &PtParams) -> MeanField {
        MeanField::from_carriers(p.gamma, p.eps_bar, Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0))
    }

    #[test]
    fn sensitivity_matches_finite_difference() {
        let h = 1e-6;
        let split = |e: f64| {
            let p = PtParams {
                eps_bar: e,
                ..PtParams::new(0.0, 1.0, 1.0, 0.0, 0.0).unwrap()
            };
            pt_eigenfrequencies(&p).unwrap().splitting().re
        };
        let fd = (split(2.0 + h) - split(2.0 - h)) / (2.0 * h);
        assert!((sensitivity(1.0, 2.0).unwrap() - fd).abs() < 1e-8);
        assert!((sensitivity(1.0, 2.0).unwrap() - 2.121_320_343_559_642_4).abs() < 1e-12);
        assert!(matches!(sensitivity(1.0, 0.0), Err(Error::Divergence(_))));
    }

    #[test]
    fn unit_imprecision() {
        let p = PtParams::new(0.0, 1.0, 1e-5, 0.0, 0.0).unwrap();
        let r = imprecision(&p, &unit(&p), 16.0 * PI).unwrap();
        assert!((r.closed_form - 1.0).abs() < 1e-15);
        let exact_factor = ((2.0 + 1e-5) / (2.0 * (1.0 + 1e-5f64).powi(2))).sqrt();
        assert!((r.imprecision / r.closed_form - exact_factor).abs() < 1e-14);
        let lead = imprecision_leading_order(&p, &unit(&p), 16.0 * PI).unwrap();
        assert!((lead.imprecision - 1.0).abs() < 1e-14);
        let hot = PtParams::new(0.0, 1.0, 1e-5, 0.5, 0.5).unwrap();
        let h = imprecision(&hot, &unit(&hot), 16.0 * PI).unwrap();
        assert!((h.closed_form / r.closed_form - 2f64.sqrt()).abs() < 1e-14);
        let dark = MeanField::from_carriers(1.0, 1e-5, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        assert!(matches!(imprecision(&p, &dark, 1.0), Err(Error::NoCarrier(_))));
    }

    #[test]
    fn noise_level_from_frequency_noise() {
        let p = PtParams::new(0.0, 1.0, 0.01, 0.0, 0.0).unwrap();
        let s = pt_frequency_noise(&p, 1.0).unwrap();
        assert!((s - 12.5).abs() < 1e-12);
        assert!((noise_level(s, s, 2.0 * PI).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(noise_level(0.0, 0.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn technical_and_crossover() {
        for &e in &[1e-2, 1e-3, 1e-4] {
            let s_f = 1.0 / (8.0 * e);
            assert!((technical_imprecision(s_f, 0.0, 1.0, e).unwrap() - 0.25).abs() < 1e-14);
        }
        let e = crossover_epsilon(1.0 / 8.0, 1.0, 1.0, 0.0).unwrap();
        assert!((e - 1.0).abs() < 1e-15);
        assert!((crossover_epsilon(0.25, 1.0, 1.0, 0.0).unwrap() - 0.5).abs() < 1e-15);
        let star = crossover_epsilon(3.7, 1.3, 0.8, 0.2).unwrap();
        let p = PtParams::new(0.0, 1.3, star, 0.2, 0.2).unwrap();
        assert!((pt_frequency_noise(&p, 0.8).unwrap() / 3.7 - 1.0).abs() < 1e-12);
    }
}
