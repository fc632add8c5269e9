use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::TimeSeries;
use crate::error::{Error, Result};

/// SplitMix64 finalizer of `base + (index + 1) * golden`; used to derive per-point seeds.
pub fn mix_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) struct Noise {
    rng: ChaCha8Rng,
    on: bool,
}

impl Noise {
    pub(crate) fn new(seed: u64, on: bool) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            on,
        }
    }

    /// Field sample whose quadratures each have variance `var`.
    #[inline]
    pub(crate) fn field(&mut self, var: f64) -> Complex64 {
        if !self.on {
            return Complex64::new(0.0, 0.0);
        }
        let s = (0.5 * var).sqrt();
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Complex64::new(s * re, s * im)
    }
}

/// Two independent white quadrature streams of variance `(1/2 + n_th)/dt` per sample, so the
/// estimated double-sided PSD is flat at `1/2 + n_th`.
pub fn gaussian_quadrature_noise(n_th: f64, dt: f64, count: usize, seed: u64) -> Result<TimeSeries> {
    if !(n_th >= 0.0 && n_th.is_finite()) {
        return Err(Error::Domain(format!("n_th must be >= 0 (got {n_th})")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain(format!("dt must be > 0 (got {dt})")));
    }
    let mut noise = Noise::new(seed, true);
    let var = (0.5 + n_th) / dt;
    Ok(TimeSeries {
        dt,
        t0: 0.0,
        omega0: 0.0,
        field: (0..count).map(|_| noise.field(var)).collect(),
    })
}
