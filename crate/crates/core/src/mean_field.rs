//! Carrier (mean-field) amplitudes and derived photon fluxes.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::Result;
use crate::params::{PhaseSensitiveParams, PtParams, Validate};
use crate::spectrum::Quadrature;

/// Two-carrier steady state of the PT-symmetric sensor.
///
/// In the frame rotating at `omega0` the carriers are
/// `a(t) = a_plus e^{-i s t} + a_minus e^{i s t}` with `s` the half splitting, and likewise for `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanField {
    pub a_plus: Complex64,
    pub a_minus: Complex64,
    pub b_plus: Complex64,
    pub b_minus: Complex64,
    pub gamma: f64,
}

/// Fourier coefficients of a carrier quadrature signal at the two sidebands.
///
/// `x(t) = plus e^{-i s t} + minus e^{i s t}`; for a real quadrature `minus = conj(plus)`
/// whenever only one mode is considered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierQuadrature {
    pub a_minus: Complex64,
    pub a_plus: Complex64,
    pub b_minus: Complex64,
    pub b_plus: Complex64,
}

/// Unit-modulus factor relating `b_pm` to `a_pm`.
pub fn b_factor(eps_bar: f64, sign: f64) -> Complex64 {
    let root = (eps_bar * (2.0 + eps_bar)).sqrt();
    Complex64::new(1.0, -sign * root) / (1.0 + eps_bar)
}

/// Steady state for given carrier amplitudes of the lossy mode.
pub fn mean_field_solution(params: &PtParams, a_plus: Complex64, a_minus: Complex64) -> Result<MeanField> {
    params.check()?;
    Ok(MeanField::from_carriers(params.gamma, params.eps_bar, a_plus, a_minus))
}

impl MeanField {
    /// Builds the state without parameter validation; `eps_bar = 0` gives the EP limit.
    pub fn from_carriers(gamma: f64, eps_bar: f64, a_plus: Complex64, a_minus: Complex64) -> Self {
        Self {
            a_plus,
            a_minus,
            b_plus: b_factor(eps_bar, 1.0) * a_plus,
            b_minus: b_factor(eps_bar, -1.0) * a_minus,
            gamma,
        }
    }

    /// Out-coupled photon flux at `Omega_+`.
    pub fn flux_plus(&self) -> f64 {
        2.0 * self.gamma * self.a_plus.norm_sqr()
    }

    pub fn flux_minus(&self) -> f64 {
        2.0 * self.gamma * self.a_minus.norm_sqr()
    }

    pub fn has_carrier(&self) -> bool {
        self.a_plus.norm_sqr() > 0.0 || self.a_minus.norm_sqr() > 0.0
    }

    /// Carrier amplitude of mode `a` at time `t` in the rotating frame.
    pub fn a_at(&self, s: f64, t: f64) -> Complex64 {
        self.a_plus * Complex64::cis(-s * t) + self.a_minus * Complex64::cis(s * t)
    }

    pub fn b_at(&self, s: f64, t: f64) -> Complex64 {
        self.b_plus * Complex64::cis(-s * t) + self.b_minus * Complex64::cis(s * t)
    }

    /// Sideband components of the carrier quadrature `x`.
    ///
    /// With `q = sqrt(2) Re a` and `p = sqrt(2) Im a`, the component at `+s` is
    /// `(a_plus + conj(a_minus))/sqrt(2)` for `q` and `(a_plus - conj(a_minus))/(i sqrt(2))` for `p`.
    pub fn quadrature(&self, x: Quadrature) -> CarrierQuadrature {
        let split = |plus: Complex64, minus: Complex64| match x {
            Quadrature::Q => (
                (minus + plus.conj()) * FRAC_1_SQRT_2,
                (plus + minus.conj()) * FRAC_1_SQRT_2,
            ),
            Quadrature::P => (
                (minus - plus.conj()) * Complex64::new(0.0, -FRAC_1_SQRT_2),
                (plus - minus.conj()) * Complex64::new(0.0, -FRAC_1_SQRT_2),
            ),
        };
        let (a_minus, a_plus) = split(self.a_plus, self.a_minus);
        let (b_minus, b_plus) = split(self.b_plus, self.b_minus);
        CarrierQuadrature {
            a_minus,
            a_plus,
            b_minus,
            b_plus,
        }
    }
}

/// Steady state of the phase-sensitive sensor: both carriers lie on the amplitude quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsMeanField {
    pub q0: Complex64,
    pub qb_plus: Complex64,
    pub qb_minus: Complex64,
    pub gamma_a: f64,
}

impl PsMeanField {
    /// Out-coupled photon flux at each of `Omega_pm`.
    pub fn flux(&self) -> f64 {
        4.0 * self.gamma_a * self.q0.norm_sqr()
    }
}

/// Amplitude-quadrature steady state `q_a = q0 e^{-i s t} + c.c.`, `p_a = p_b = 0`.
pub fn ps_mean_steady_state(params: &PhaseSensitiveParams, q0: Complex64) -> Result<PsMeanField> {
    params.check()?;
    Ok(PsMeanField {
        q0,
        qb_plus: b_factor(params.eps_bar, 1.0) * q0,
        qb_minus: b_factor(params.eps_bar, -1.0) * q0.conj(),
        gamma_a: params.gamma_a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ep_limit_factor_is_one() {
        let m = MeanField::from_carriers(1.0, 0.0, c(1.0, 0.0), c(0.0, 0.0));
        assert_eq!(m.b_plus, c(1.0, 0.0));
    }

    #[test]
    fn flux() {
        let p = PtParams::new(0.0, 1.0, 0.1, 0.0, 0.0).unwrap();
        let m = mean_field_solution(&p, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(m.flux_plus(), 2.0);
        assert_eq!(m.flux_minus(), 0.0);
    }

    #[test]
    fn b_plus_at_two_percent() {
        let p = PtParams::new(0.0, 1.0, 0.02, 0.0, 0.0).unwrap();
        let m = mean_field_solution(&p, c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        // sqrt(0.02 * 2.02) = 0.200997512...
        let expected = c(1.0, -0.200_997_512_422_417_7) / 1.02;
        assert!((m.b_plus - expected).norm() < 1e-15);
        assert!((m.b_plus.re.hypot(m.b_plus.im) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quadrature_components_reconstruct_signal() {
        let m = MeanField::from_carriers(1.0, 0.03, c(0.7, -0.2), c(0.1, 0.4));
        let s = 0.37;
        for x in [Quadrature::Q, Quadrature::P] {
            let k = m.quadrature(x);
            for &t in &[0.0, 0.9, 2.3, -4.1] {
                let a = m.a_at(s, t);
                let b = m.b_at(s, t);
                let direct = |z: Complex64| match x {
                    Quadrature::Q => std::f64::consts::SQRT_2 * z.re,
                    Quadrature::P => std::f64::consts::SQRT_2 * z.im,
                };
                let ra = k.a_plus * Complex64::cis(-s * t) + k.a_minus * Complex64::cis(s * t);
                let rb = k.b_plus * Complex64::cis(-s * t) + k.b_minus * Complex64::cis(s * t);
                assert!((ra.re - direct(a)).abs() < 1e-14 && ra.im.abs() < 1e-14);
                assert!((rb.re - direct(b)).abs() < 1e-14 && rb.im.abs() < 1e-14);
            }
        }
    }

    #[test]
    fn phase_sensitive_flux() {
        let p = PhaseSensitiveParams::new(0.0, 1.0, 0.0, 1.0, 0.02, 0.0).unwrap();
        assert_eq!(ps_mean_steady_state(&p, c(1.0, 0.0)).unwrap().flux(), 4.0);
        assert_eq!(ps_mean_steady_state(&p, c(0.0, 0.0)).unwrap().flux(), 0.0);
        let m = ps_mean_steady_state(&p, c(0.3, 0.4)).unwrap();
        assert!((m.qb_plus.norm() - 0.5).abs() < 1e-15);
    }
}
