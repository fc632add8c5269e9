use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::{check_record, SimConfig, TimeSeries, Window};
use crate::error::Result;
use crate::spectrum::{Quadrature, Spectrum};

/// Segments summed sequentially per parallel task; fixed so the result does not depend on
/// the number of worker threads.
const GROUP: usize = 8;

/// Segment-averaged periodogram `dt/(L U) |sum_n w_n x_n e^{i omega t_n}|^2` on the
/// ascending baseband grid `2 pi m / (L dt)`, `U = mean(w^2)`.
///
/// Hann segments overlap by half, rectangular segments do not overlap.
pub fn welch(samples: &[Complex64], dt: f64, segments: usize, window: Window) -> Result<Spectrum> {
    let n = samples.len();
    check_record(n, segments)?;
    let (mut len, step) = match window {
        Window::Hann => {
            let l = 2 * n / (segments + 1);
            (l, l / 2)
        }
        Window::Rectangular => (n / segments, n / segments),
    };
    len -= len % 2;
    let w: Vec<f64> = match window {
        Window::Hann => (0..len)
            .map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / len as f64).cos())
            .collect(),
        Window::Rectangular => vec![1.0; len],
    };
    let u = w.iter().map(|v| v * v).sum::<f64>() / len as f64;
    let fft = FftPlanner::new().plan_fft_inverse(len);

    let periodogram = |seg: usize, acc: &mut [f64], buf: &mut Vec<Complex64>| {
        let start = seg * step;
        buf.clear();
        buf.extend(samples[start..start + len].iter().zip(&w).map(|(x, w)| x * w));
        fft.process(buf);
        for (a, v) in acc.iter_mut().zip(buf.iter()) {
            *a += v.norm_sqr();
        }
    };
    let groups: Vec<Vec<f64>> = (0..segments.div_ceil(GROUP))
        .into_par_iter()
        .map(|g| {
            let mut acc = vec![0.0; len];
            let mut buf = Vec::with_capacity(len);
            for seg in g * GROUP..((g + 1) * GROUP).min(segments) {
                periodogram(seg, &mut acc, &mut buf);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; len];
    for g in &groups {
        for (t, v) in total.iter_mut().zip(g) {
            *t += v;
        }
    }

    let norm = dt / (len as f64 * u * segments as f64);
    let half = (len / 2) as i64;
    let df = 2.0 * PI / (len as f64 * dt);
    let (grid, values) = (-half..half)
        .map(|m| (m as f64 * df, total[m.rem_euclid(len as i64) as usize] * norm))
        .unzip();
    Spectrum::new(grid, values)
}

/// PSD of one output quadrature, reported on `omega0 + baseband`.
pub fn welch_psd(series: &TimeSeries, x: Quadrature, cfg: &SimConfig) -> Result<Spectrum> {
    let q: Vec<Complex64> = series.quadrature(x).into_iter().map(Complex64::from).collect();
    let mut s = welch(&q, series.dt, cfg.segments, cfg.window)?;
    for w in &mut s.grid {
        *w += series.omega0;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::gaussian_quadrature_noise;

    #[test]
    fn white_noise_calibration() {
        let s = gaussian_quadrature_noise(0.0, 1e-3, 1 << 18, 3).unwrap();
        let cfg = SimConfig {
            segments: 64,
            ..SimConfig::new(1e-3, 0.0, 0)
        };
        let psd = welch_psd(&s, Quadrature::Q, &cfg).unwrap();
        let mean = psd.values.iter().sum::<f64>() / psd.len() as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
        let worst = psd.values.iter().map(|v| (v / 0.5 - 1.0).abs()).fold(0.0, f64::max);
        assert!(worst < 0.8, "{worst}");
    }

    #[test]
    fn tone_lands_at_positive_frequency() {
        let dt = 0.01;
        let w0 = 102.0 * 2.0 * PI / (2048.0 * dt);
        let x: Vec<Complex64> = (0..1 << 14).map(|k| Complex64::cis(-w0 * k as f64 * dt)).collect();
        let s = welch(&x, dt, 8, Window::Rectangular).unwrap();
        let k = s.values.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!((s.grid[k] - w0).abs() < 1e-9, "{}", s.grid[k]);
    }

    #[test]
    fn rejects_short_records() {
        let x = vec![Complex64::new(0.0, 0.0); 1000];
        assert!(matches!(
            welch(&x, 1.0, 8, Window::Hann),
            Err(crate::Error::Resolution(_))
        ));
        assert!(matches!(
            welch(&x, 1.0, 2, Window::Hann),
            Err(crate::Error::Resolution(_))
        ));
    }
}
