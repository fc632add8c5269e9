//! Normal-mode frequencies from closed forms and from a direct 2x2 eigensolve.

use num_complex::Complex64;

use crate::error::{Error, Result, Violation};
use crate::linalg::Mat2;
use crate::params::{ActiveParams, PassiveParams, PtParams, Validate};

/// Complex normal-mode frequencies: real part is the frequency, imaginary part the growth rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub omega_minus: Complex64,
    pub omega_plus: Complex64,
}

impl EigenPair {
    fn sorted(a: Complex64, b: Complex64) -> Self {
        let key = |z: Complex64| (z.re, z.im);
        if key(a) <= key(b) {
            Self {
                omega_minus: a,
                omega_plus: b,
            }
        } else {
            Self {
                omega_minus: b,
                omega_plus: a,
            }
        }
    }

    pub fn splitting(&self) -> Complex64 {
        self.omega_plus - self.omega_minus
    }
}

/// Normal-mode frequencies of `x' = A x`: with `x ~ e^{-i Omega t}`, `Omega = i lambda(A)`.
/// Sorted by real part, then imaginary part.
pub fn eigen_numeric(a: &Mat2) -> EigenPair {
    let i = Complex64::i();
    let [l1, l2] = a.eigenvalues();
    EigenPair::sorted(i * l1, i * l2)
}

/// Lab-frame rate matrix of the PT-symmetric sensor.
pub fn pt_matrix(omega0: f64, gamma: f64, eps: f64) -> Mat2 {
    let d = Complex64::new(0.0, -omega0);
    let k = gamma * (1.0 + eps);
    Mat2::new(d - gamma, k.into(), (-k).into(), d + gamma)
}

pub fn passive_matrix(p: &PassiveParams) -> Mat2 {
    let d = Complex64::new(0.0, -p.omega0);
    let k = p.coupling();
    Mat2::new(d - p.gamma_a, k.into(), (-k).into(), d - p.gamma_b)
}

pub fn active_matrix(p: &ActiveParams) -> Mat2 {
    let d = Complex64::new(0.0, -p.omega0);
    let k = p.coupling();
    Mat2::new(d - p.gamma, k.into(), (-k).into(), d + p.g)
}

/// `Omega_0 +- gamma sqrt(eps (2 + eps))`. Accepts `eps_bar = 0` (the EP itself).
pub fn pt_eigenfrequencies(p: &PtParams) -> Result<EigenPair> {
    let mut v = Vec::new();
    if !p.omega0.is_finite() {
        v.push(Violation::new("omega0", "be finite", p.omega0));
    }
    if !(p.gamma > 0.0 && p.gamma.is_finite()) {
        v.push(Violation::new("gamma", "be > 0", p.gamma));
    }
    if !(p.eps_bar >= 0.0 && p.eps_bar.is_finite()) {
        v.push(Violation::new("eps_bar", "be >= 0", p.eps_bar));
    }
    Error::check(v)?;
    let s = p.half_splitting();
    Ok(EigenPair {
        omega_minus: (p.omega0 - s).into(),
        omega_plus: (p.omega0 + s).into(),
    })
}

/// `Omega_0 - i(gamma_a + gamma_b)/2 +- |gamma_a - gamma_b| sqrt(eps (2 + eps)) / 2`.
pub fn passive_eigenfrequencies(p: &PassiveParams) -> Result<EigenPair> {
    p.check()?;
    let centre = Complex64::new(p.omega0, -0.5 * (p.gamma_a + p.gamma_b));
    let half = Complex64::from(p.eps * (2.0 + p.eps)).sqrt() * (0.5 * (p.gamma_a - p.gamma_b).abs());
    Ok(EigenPair::sorted(centre - half, centre + half))
}

/// `Omega_0 - i(gamma - g)/2 +- (g + gamma) sqrt(eps (2 + eps)) / 2`.
pub fn active_eigenfrequencies(p: &ActiveParams) -> Result<EigenPair> {
    if p.g > p.gamma {
        return Err(Error::Stability(format!(
            "gain g = {} exceeds loss gamma = {}; saturation returns the sensor to g = gamma",
            p.g, p.gamma
        )));
    }
    p.check()?;
    let centre = Complex64::new(p.omega0, -0.5 * (p.gamma - p.g));
    let half = Complex64::from(p.eps * (2.0 + p.eps)).sqrt() * (0.5 * (p.gamma + p.g));
    Ok(EigenPair::sorted(centre - half, centre + half))
}
