use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// A single violated parameter constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: &'static str,
    pub constraint: String,
    pub value: f64,
}

impl Violation {
    pub fn new(field: &'static str, constraint: impl Into<String>, value: f64) -> Self {
        Self {
            field,
            constraint: constraint.into(),
            value,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} must {} (got {})", self.field, self.constraint, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameters: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole: omega = {omega} rad/s is within {distance:e} rad/s of the resonance at {resonance} rad/s")]
    Pole { omega: f64, resonance: f64, distance: f64 },
    #[error("divergence: {0}")]
    Divergence(String),
    #[error("no carrier: {0}")]
    NoCarrier(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("calibration error: {0}")]
    Calibration(String),
    #[error("stability error: {0}")]
    Stability(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("usage error: {0}")]
    Usage(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub(crate) fn check(violations: Vec<Violation>) -> Result<()> {
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(violations))
        }
    }
}
