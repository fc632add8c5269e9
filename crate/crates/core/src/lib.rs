//! Noise and sensitivity models for two-mode exceptional-point sensors.
//!
//! All frequencies are angular (rad/s). Quadrature spectra are double-sided and
//! symmetrized, with vacuum contributing 1/2 per quadrature. Field quantities are
//! handled in the frame rotating at the bare resonance `omega0`, so gains are
//! functions of the detuning `omega - omega0`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimation;
pub mod linalg;
pub mod loop_model;
pub mod markovian;
pub mod mean_field;
pub mod params;
pub mod phase_sensitive;
pub mod spectrum;
pub mod stochastic;
pub mod thermal;
pub mod validation;

pub use error::{Error, Result, Violation};
pub use mean_field::{MeanField, PsMeanField};
pub use params::{ActiveParams, LoopParams, PassiveParams, PhaseSensitiveParams, PsLoopParams, PtParams, Validate};
pub use spectrum::{Channel, Grid, Quadrature, Spectrum, TransferFunctionSet};

pub use num_complex::Complex64;
