//! Phase-sensitive PT-symmetric sensor, analysed in the quadrature basis of the frame
//! rotating at `omega0` with the pump phase fixed so that the amplitude quadrature `q` carries
//! the carrier and the phase quadrature `p` is de-amplified.

pub mod delay_loop;
pub mod markovian;

pub use delay_loop::{
    ps_loop_gains, ps_loop_near_resonance, ps_loop_pure_near_resonance, ps_nonmarkovian_phase_spectrum,
    ps_nonmarkovian_quadrature_tfs,
};
pub use markovian::{
    ps_balanced_near_resonance, ps_gains, ps_imprecision, ps_lossy_near_resonance, ps_output_phase_spectrum,
    ps_output_spectrum, ps_phase_transfer_functions, ps_pure_near_resonance, ps_quadrature_eigenvalues,
    ps_transfer_functions, QuadratureEigenSet,
};
