//! Time-domain simulation of the sensor models and spectral estimation of their output.
//!
//! Every simulation is sequential and fully determined by its seed. Output samples are
//! out-coupled field fluctuations in the frame rotating at `omega0`, scaled so that their
//! quadrature PSD is directly comparable to the analytic spectra (vacuum = 1/2).

mod delay;
mod demod;
mod markov;
mod noise;
mod welch;

pub use delay::{loop_pass_matrix, simulate_loop, simulate_ps_loop};
pub use demod::extract_frequency_noise;
pub use markov::{simulate_passive, simulate_pt_markovian};
pub use noise::{gaussian_quadrature_noise, mix_seed};
pub use welch::{welch, welch_psd};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectrum::Quadrature;

/// Minimum samples per Welch segment.
pub const MIN_SEGMENT_LEN: usize = 256;
/// Minimum number of Welch segments.
pub const MIN_SEGMENTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Window {
    Rectangular,
    #[default]
    Hann,
}

impl Window {
    pub fn name(self) -> &'static str {
        match self {
            Window::Rectangular => "rectangular",
            Window::Hann => "hann",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Integration step (s). Loop maps step one round trip and ignore it.
    pub dt: f64,
    /// Recorded duration (s), after burn-in.
    pub duration: f64,
    pub seed: u64,
    pub segments: usize,
    pub window: Window,
    /// Extra damping applied to both modes (rad/s); the analytic reference must use `z + i gamma_reg`.
    pub gamma_reg: f64,
    /// Simulated time discarded before recording (s).
    pub burn_in: f64,
    /// Loop maps: round trips block-averaged into one output sample.
    pub decimation: usize,
    /// `false` zeroes every noise input.
    pub noise: bool,
    /// Initial fluctuation state `(a, b)`.
    pub initial_state: [Complex64; 2],
}

impl SimConfig {
    pub fn new(dt: f64, duration: f64, seed: u64) -> Self {
        Self {
            dt,
            duration,
            seed,
            segments: 16,
            window: Window::Hann,
            gamma_reg: 0.0,
            burn_in: 0.0,
            decimation: 1,
            noise: true,
            initial_state: [Complex64::new(0.0, 0.0); 2],
        }
    }

    /// Number of recorded samples at output spacing `dt_out`.
    pub fn samples_for(&self, dt_out: f64) -> usize {
        (self.duration / dt_out).round() as usize
    }

    pub(crate) fn check(&self, dt_out: f64) -> Result<usize> {
        let bad = |what: &str, v: f64| Err(Error::Invalid(vec![crate::Violation::new("sim", what.to_string(), v)]));
        if !(dt_out > 0.0 && dt_out.is_finite()) {
            return bad("have dt > 0", dt_out);
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad("have duration > 0", self.duration);
        }
        if !(self.burn_in >= 0.0 && self.burn_in.is_finite()) {
            return bad("have burn_in >= 0", self.burn_in);
        }
        if !(self.gamma_reg >= 0.0 && self.gamma_reg.is_finite()) {
            return bad("have gamma_reg >= 0", self.gamma_reg);
        }
        if self.decimation == 0 {
            return bad("have decimation >= 1", 0.0);
        }
        let n = self.samples_for(dt_out);
        check_record(n, self.segments)?;
        Ok(n)
    }
}

pub(crate) fn check_record(n: usize, segments: usize) -> Result<()> {
    if segments < MIN_SEGMENTS {
        return Err(Error::Resolution(format!(
            "{segments} Welch segments requested, at least {MIN_SEGMENTS} are needed"
        )));
    }
    if n < segments * MIN_SEGMENT_LEN {
        return Err(Error::Resolution(format!(
            "record has {n} samples but {segments} segments need at least {}; increase duration or reduce segments",
            segments * MIN_SEGMENT_LEN
        )));
    }
    Ok(())
}

/// Out-coupled field samples `(q + i p)/sqrt(2)`; sample `k` averages the field over
/// `[t0 + k dt, t0 + (k + 1) dt]` (loop maps: the instant `t0 + k dt`).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub dt: f64,
    pub t0: f64,
    /// Rotating-frame frequency; spectra are reported on `omega0 + baseband`.
    pub omega0: f64,
    pub field: Vec<Complex64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.field.len()
    }

    pub fn is_empty(&self) -> bool {
        self.field.is_empty()
    }

    pub fn quadrature(&self, x: Quadrature) -> Vec<f64> {
        let f = |z: &Complex64| match x {
            Quadrature::Q => std::f64::consts::SQRT_2 * z.re,
            Quadrature::P => std::f64::consts::SQRT_2 * z.im,
        };
        self.field.iter().map(f).collect()
    }

    pub(crate) fn checked(self) -> Result<Self> {
        if self.field.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Divergence("simulated output is not finite".into()));
        }
        Ok(self)
    }
}
