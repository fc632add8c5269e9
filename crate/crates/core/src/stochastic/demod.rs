use num_complex::Complex64;

use super::{welch, SimConfig, TimeSeries};
use crate::error::{Error, Result};
use crate::spectrum::Spectrum;

/// Frequency-noise spectrum `dw^2/(4 gamma |a|^2) S_pp(dw)` of the carrier at
/// `carrier_omega` (lab frame), for offsets `dw > 0`.
///
/// `carrier` is the intracavity carrier amplitude: its modulus sets `|a|` and its phase is the
/// reference for the phase quadrature, which is taken relative to the carrier after
/// demodulation.
pub fn extract_frequency_noise(
    series: &TimeSeries,
    carrier_omega: f64,
    carrier: Complex64,
    gamma: f64,
    cfg: &SimConfig,
) -> Result<Spectrum> {
    let amp = carrier.norm();
    if !(amp > 0.0) {
        return Err(Error::NoCarrier("carrier amplitude must be > 0".into()));
    }
    let w = carrier_omega - series.omega0;
    let reference = Complex64::cis(-carrier.arg());
    let p_rel: Vec<Complex64> = series
        .field
        .iter()
        .enumerate()
        .map(|(k, y)| {
            let t = series.t0 + (k as f64 + 0.5) * series.dt;
            let z = y * Complex64::cis(w * t) * reference;
            Complex64::new(std::f64::consts::SQRT_2 * z.im, 0.0)
        })
        .collect();
    let s = welch(&p_rel, series.dt, cfg.segments, cfg.window)?;
    let (grid, values) = s
        .grid
        .iter()
        .zip(&s.values)
        .filter(|(dw, _)| **dw > 0.0)
        .map(|(&dw, &v)| (dw, dw * dw / (4.0 * gamma * amp * amp) * v))
        .unzip();
    Spectrum::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::gaussian_quadrature_noise;

    #[test]
    fn recovers_injected_phase_noise() {
        // carrier sqrt(2 gamma) a e^{-i s t} with white phase-quadrature noise of PSD 1/2
        let (gamma, s, dt): (f64, f64, f64) = (1.0, 0.3, 0.1);
        let a = Complex64::from_polar(1.5, 0.4);
        let n = gaussian_quadrature_noise(0.0, dt, 1 << 17, 5).unwrap();
        let q = n.quadrature(crate::Quadrature::Q);
        let field = q
            .iter()
            .enumerate()
            .map(|(k, pn)| {
                let t = (k as f64 + 0.5) * dt;
                let rel = Complex64::new((2.0 * gamma).sqrt() * a.norm(), pn / std::f64::consts::SQRT_2);
                rel * Complex64::cis(a.arg() - s * t)
            })
            .collect();
        let series = TimeSeries {
            dt,
            t0: 0.0,
            omega0: 10.0,
            field,
        };
        let cfg = SimConfig {
            segments: 64,
            ..SimConfig::new(dt, 0.0, 0)
        };
        let f = extract_frequency_noise(&series, 10.0 + s, a, gamma, &cfg).unwrap();
        let ratio: Vec<f64> = f
            .grid
            .iter()
            .zip(&f.values)
            .map(|(dw, v)| v / (dw * dw / (4.0 * gamma * a.norm_sqr()) * 0.5))
            .collect();
        let mean = ratio.iter().sum::<f64>() / ratio.len() as f64;
        assert!((mean - 1.0).abs() < 0.05, "{mean}");
        let doubled = extract_frequency_noise(&series, 10.0 + s, 2.0 * a, gamma, &cfg).unwrap();
        assert!((doubled.values[10] * 4.0 / f.values[10] - 1.0).abs() < 1e-12);
    }
}
