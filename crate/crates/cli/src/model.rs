//! Builds validated core parameter records from a configuration point.

use std::f64::consts::TAU;

use epsense_core::loop_model::{loop_resonances, wrap_phase};
use epsense_core::markovian::transfer::active_real_poles;
use epsense_core::mean_field::ps_mean_steady_state;
use epsense_core::{
    ActiveParams, Complex64, LoopParams, MeanField, PassiveParams, PhaseSensitiveParams, PsLoopParams, PsMeanField,
    PtParams,
};

use crate::config::{GridReference, ModelId, Params};
use crate::exit::Failure;

/// Relative pole-guard width: `1e-6 gamma` (Markovian) or `1e-6 / tau` (loop).
pub const POLE_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, Copy)]
pub enum Model {
    Passive(PassiveParams),
    Active(ActiveParams),
    Pt(PtParams, MeanField),
    Loop(LoopParams, f64),
    Ps(PhaseSensitiveParams, PsMeanField),
    PsLoop(PsLoopParams),
}

pub(crate) fn require(p: &Params, key: &str, model: ModelId) -> Result<f64, Failure> {
    p.get(key)
        .ok_or_else(|| Failure::validation(format!("model `{}` requires parameter `{key}`", model.name())))
}

fn or_zero(p: &Params, key: &str) -> f64 {
    p.get(key).unwrap_or(0.0)
}

pub(crate) fn carrier_plus(p: &Params) -> Complex64 {
    Complex64::new(or_zero(p, "carrier_plus_re"), or_zero(p, "carrier_plus_im"))
}

pub(crate) fn carrier_minus(p: &Params) -> Complex64 {
    Complex64::new(or_zero(p, "carrier_minus_re"), or_zero(p, "carrier_minus_im"))
}

impl Model {
    pub fn build(id: ModelId, p: &Params) -> Result<Model, Failure> {
        let omega0 = or_zero(p, "omega0_rad_s");
        Ok(match id {
            ModelId::Passive => Model::Passive(PassiveParams::new(
                omega0,
                require(p, "gamma_a_rad_s", id)?,
                require(p, "gamma_b_rad_s", id)?,
                require(p, "eps", id)?,
                or_zero(p, "n_a"),
                or_zero(p, "n_b"),
            )?),
            ModelId::Active => Model::Active(ActiveParams::new(
                omega0,
                require(p, "gamma_rad_s", id)?,
                require(p, "g_rad_s", id)?,
                require(p, "eps", id)?,
                or_zero(p, "n_in"),
                or_zero(p, "n_amp"),
            )?),
            ModelId::Pt => {
                let q = PtParams::new(
                    omega0,
                    require(p, "gamma_rad_s", id)?,
                    require(p, "eps", id)?,
                    or_zero(p, "n_in"),
                    or_zero(p, "n_amp"),
                )?;
                let m = MeanField::from_carriers(q.gamma, q.eps_bar, carrier_plus(p), carrier_minus(p));
                Model::Pt(q, m)
            }
            ModelId::Loop => Model::Loop(
                LoopParams::new(
                    require(p, "eta", id)?,
                    require(p, "tau_s", id)?,
                    require(p, "eps", id)?,
                    omega0,
                    or_zero(p, "n_th"),
                )?,
                carrier_plus(p).norm(),
            ),
            ModelId::Ps => {
                let mut q = PhaseSensitiveParams::new(
                    omega0,
                    require(p, "gamma_a_rad_s", id)?,
                    or_zero(p, "gamma_b_rad_s"),
                    require(p, "r_rad_s", id)?,
                    require(p, "eps", id)?,
                    or_zero(p, "n_th"),
                )?;
                q.pump_phase = or_zero(p, "pump_phase_rad");
                let m = ps_mean_steady_state(&q, carrier_plus(p))?;
                Model::Ps(q, m)
            }
            ModelId::PsLoop => Model::PsLoop(PsLoopParams::new(
                require(p, "eta", id)?,
                require(p, "tau_s", id)?,
                require(p, "eps", id)?,
                omega0,
                require(p, "xi", id)?,
                or_zero(p, "n_th"),
            )?),
        })
    }

    pub fn omega0(&self) -> f64 {
        match self {
            Model::Passive(p) => p.omega0,
            Model::Active(p) => p.omega0,
            Model::Pt(p, _) => p.omega0,
            Model::Loop(p, _) => p.omega0,
            Model::Ps(p, _) => p.omega0,
            Model::PsLoop(p) => p.omega0,
        }
    }

    /// Real resonances `[Omega_-, Omega_+]` (the principal pair for the loops), if any.
    pub fn resonances(&self) -> Result<Option<[f64; 2]>, Failure> {
        Ok(match self {
            Model::Passive(_) => None,
            Model::Active(p) => active_real_poles(p).try_into().ok(),
            Model::Pt(p, _) => Some(p.resonances()),
            Model::Loop(p, _) => Some(loop_resonances(p)?),
            Model::Ps(p, _) => Some(p.resonances()),
            Model::PsLoop(p) => Some(loop_resonances(&p.as_loop())?),
        })
    }

    fn loop_tau(&self) -> Option<f64> {
        match self {
            Model::Loop(p, _) => Some(p.tau),
            Model::PsLoop(p) => Some(p.tau),
            _ => None,
        }
    }

    fn rate_scale(&self) -> f64 {
        match self {
            Model::Passive(p) => p.gamma_a,
            Model::Active(p) => p.gamma,
            Model::Pt(p, _) => p.gamma,
            Model::Ps(p, _) => p.gamma_a,
            Model::Loop(p, _) => 1.0 / p.tau,
            Model::PsLoop(p) => 1.0 / p.tau,
        }
    }

    /// Whether `omega` falls inside the pole guard of any real resonance (including the
    /// periodic images of the loop resonances).
    pub fn near_pole(&self, omega: f64) -> Result<bool, Failure> {
        let Some(res) = self.resonances()? else {
            return Ok(false);
        };
        let width = POLE_GUARD * self.rate_scale();
        Ok(match self.loop_tau() {
            Some(tau) => {
                let phi = wrap_phase((omega - self.omega0()) * tau);
                res.iter().any(|r| {
                    let d = wrap_phase(phi - (r - self.omega0()) * tau).abs();
                    d.min(TAU - d) < POLE_GUARD
                })
            }
            None => res.iter().any(|r| (omega - r).abs() < width),
        })
    }

    /// Origin of grid coordinates for `reference`.
    pub fn grid_origin(&self, reference: GridReference) -> Result<f64, Failure> {
        let res = || {
            self.resonances()?
                .ok_or_else(|| Failure::validation("grid reference needs a model with real resonances"))
        };
        Ok(match reference {
            GridReference::Absolute => 0.0,
            GridReference::Omega0 => self.omega0(),
            GridReference::ResonancePlus => res()?[1],
            GridReference::ResonanceMinus => res()?[0],
        })
    }
}
