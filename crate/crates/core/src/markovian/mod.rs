//! Memoryless (input-output) models: passive, active, and PT-symmetric sensors.

pub mod eigen;
pub mod perturbation;
pub mod spectra;
pub mod transfer;

pub use eigen::{active_eigenfrequencies, eigen_numeric, passive_eigenfrequencies, pt_eigenfrequencies, EigenPair};
pub use perturbation::{diagonal_perturbation_eigen, Classification, DiagonalKind, DiagonalPerturbationResult};
pub use spectra::{
    frequency_noise_spectrum, passive_output_spectrum, pt_frequency_noise, pt_output_spectrum_exact,
    pt_output_spectrum_near_resonance, weak_force_output_spectrum,
};
pub use transfer::{active_transfer_functions, passive_transfer_functions, pt_output_quadrature_relation};
