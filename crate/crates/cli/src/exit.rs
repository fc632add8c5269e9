//! Exit codes and the error type that carries them.

use std::fmt;

use epsense_core::Error;

pub const OK: u8 = 0;
pub const VALIDATION: u8 = 2;
pub const POLE: u8 = 3;
pub const RESOLUTION: u8 = 4;
pub const INTERNAL: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self::new(VALIDATION, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(INTERNAL, message)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Failure {}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Pole { .. } => POLE,
            Error::Resolution(_) => RESOLUTION,
            Error::Shape(_) => INTERNAL,
            Error::Invalid(_)
            | Error::Domain(_)
            | Error::Divergence(_)
            | Error::NoCarrier(_)
            | Error::Calibration(_)
            | Error::Stability(_)
            | Error::Usage(_) => VALIDATION,
        };
        Self::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::internal(format!("i/o error: {e}"))
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        if let Some(core) = e.downcast_ref::<Error>() {
            return core.clone().into();
        }
        Self::validation(format!("{e:#}"))
    }
}
