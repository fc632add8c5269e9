//! Bose-Einstein occupation of a thermal bath mode.

use crate::error::{Error, Result};

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;

/// Mean photon number `1 / (exp(hbar omega / k_B T) - 1)` of a mode at angular frequency
/// `omega` (rad/s) in equilibrium at `temperature` (K).
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::Domain(format!("omega must be > 0 (got {omega})")));
    }
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return Err(Error::Domain(format!("temperature must be >= 0 (got {temperature})")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    Ok(occupation_from_ratio(HBAR * omega / (K_B * temperature)))
}

/// Occupation for a given `hbar omega / k_B T`.
pub fn occupation_from_ratio(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// Quadrature PSD of a thermal channel, vacuum contributing 1/2.
pub fn quadrature_psd(n: f64) -> f64 {
    0.5 + n
}
