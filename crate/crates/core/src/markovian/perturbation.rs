//! Perturbations of the diagonal elements of the PT-symmetric coupling matrix.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Mat2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalKind {
    CommonFrequency,
    DifferentialFrequency,
    DifferentialGainLoss,
    CommonGainLoss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    DegeneracyNotLifted,
    LinearResponse,
    RevertsBelowThreshold,
    EquivalentToCouplingPerturbation,
}

impl DiagonalKind {
    pub const ALL: [DiagonalKind; 4] = [
        DiagonalKind::CommonFrequency,
        DiagonalKind::DifferentialFrequency,
        DiagonalKind::DifferentialGainLoss,
        DiagonalKind::CommonGainLoss,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DiagonalKind::CommonFrequency => "common_frequency",
            DiagonalKind::DifferentialFrequency => "differential_frequency",
            DiagonalKind::DifferentialGainLoss => "differential_gainloss",
            DiagonalKind::CommonGainLoss => "common_gainloss",
        }
    }

    /// Lab-frame rate matrix of the perturbed sensor.
    pub fn matrix(self, gamma: f64, omega0: f64, eps: f64) -> Mat2 {
        let w = |scale: f64| Complex64::new(0.0, -omega0 * scale);
        let (a, d) = match self {
            DiagonalKind::CommonFrequency => (w(1.0 + eps) - gamma, w(1.0 + eps) + gamma),
            DiagonalKind::DifferentialFrequency => (w(1.0 + eps) - gamma, w(1.0 - eps) + gamma),
            DiagonalKind::DifferentialGainLoss => (w(1.0) - gamma * (1.0 - eps), w(1.0) + gamma * (1.0 + eps)),
            DiagonalKind::CommonGainLoss => (w(1.0) - gamma * (1.0 - eps), w(1.0) + gamma * (1.0 - eps)),
        };
        Mat2::new(a, gamma.into(), (-gamma).into(), d)
    }
}

impl fmt::Display for DiagonalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DiagonalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DiagonalKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            Error::Usage(format!(
                "unknown perturbation kind '{s}' (expected one of common_frequency, \
                     differential_frequency, differential_gainloss, common_gainloss)"
            ))
        })
    }
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::DegeneracyNotLifted => "degeneracy_not_lifted",
            Classification::LinearResponse => "linear_response",
            Classification::RevertsBelowThreshold => "reverts_below_threshold",
            Classification::EquivalentToCouplingPerturbation => "equivalent_to_coupling_perturbation",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalPerturbationResult {
    pub kind: DiagonalKind,
    /// One value when the eigenvalues stay degenerate, otherwise two.
    pub eigenvalues: Vec<Complex64>,
    pub classification: Classification,
}

/// Closed-form normal-mode frequencies of the perturbed sensor and what they imply for sensing.
pub fn diagonal_perturbation_eigen(
    kind: DiagonalKind,
    gamma: f64,
    omega0: f64,
    eps: f64,
) -> Result<DiagonalPerturbationResult> {
    if !(gamma > 0.0) || !omega0.is_finite() || !eps.is_finite() {
        return Err(Error::Domain(format!(
            "need gamma > 0 and finite omega0, eps (got {gamma}, {omega0}, {eps})"
        )));
    }
    let i = Complex64::i();
    let (eigenvalues, classification) = match kind {
        DiagonalKind::CommonFrequency => (
            vec![Complex64::from(omega0 * (1.0 + eps))],
            Classification::DegeneracyNotLifted,
        ),
        DiagonalKind::DifferentialFrequency => {
            let root = (2.0 * i * gamma * omega0 * eps - eps * eps * omega0 * omega0).sqrt();
            if root == Complex64::new(0.0, 0.0) {
                (vec![omega0.into()], Classification::DegeneracyNotLifted)
            } else {
                let mut v = vec![omega0 - i * root, omega0 + i * root];
                v.sort_by(|a, b| a.im.total_cmp(&b.im));
                let class = if v[1].im > 0.0 {
                    Classification::RevertsBelowThreshold
                } else {
                    Classification::LinearResponse
                };
                (v, class)
            }
        }
        DiagonalKind::DifferentialGainLoss => (vec![omega0 + i * (gamma * eps)], Classification::LinearResponse),
        DiagonalKind::CommonGainLoss => {
            let s = Complex64::from(eps * (2.0 - eps)).sqrt() * gamma;
            (
                vec![omega0 - s, omega0 + s],
                Classification::EquivalentToCouplingPerturbation,
            )
        }
    };
    Ok(DiagonalPerturbationResult {
        kind,
        eigenvalues,
        classification,
    })
}
