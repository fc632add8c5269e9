//! Validated parameter records for each sensor class.

use std::f64::consts::TAU;

use crate::error::{Error, Result, Violation};

/// Parameter records that can report every violated constraint at once.
pub trait Validate: Sized {
    /// All violated constraints, empty when the record is valid.
    fn violations(&self) -> Vec<Violation>;

    fn check(&self) -> Result<()> {
        Error::check(self.violations())
    }

    /// Returns the record unchanged when valid.
    fn validate(self) -> Result<Self> {
        self.check()?;
        Ok(self)
    }
}

fn finite(out: &mut Vec<Violation>, field: &'static str, v: f64) -> bool {
    if v.is_finite() {
        true
    } else {
        out.push(Violation::new(field, "be finite", v));
        false
    }
}

fn positive(out: &mut Vec<Violation>, field: &'static str, v: f64) {
    if finite(out, field, v) && v <= 0.0 {
        out.push(Violation::new(field, "be > 0", v));
    }
}

fn non_negative(out: &mut Vec<Violation>, field: &'static str, v: f64) {
    if finite(out, field, v) && v < 0.0 {
        out.push(Violation::new(field, "be >= 0", v));
    }
}

fn above_minus_one(out: &mut Vec<Violation>, field: &'static str, v: f64) {
    if finite(out, field, v) && v <= -1.0 {
        out.push(Violation::new(field, "be > -1", v));
    }
}

fn open_unit(out: &mut Vec<Violation>, field: &'static str, v: f64) {
    if finite(out, field, v) && !(v > 0.0 && v < 1.0) {
        out.push(Violation::new(field, "lie in (0, 1)", v));
    }
}

/// PT-symmetric Markovian sensor: lossy mode `a`, amplifying mode `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtParams {
    pub omega0: f64,
    pub gamma: f64,
    pub eps_bar: f64,
    pub n_in: f64,
    pub n_amp: f64,
}

impl PtParams {
    pub fn new(omega0: f64, gamma: f64, eps_bar: f64, n_in: f64, n_amp: f64) -> Result<Self> {
        Self {
            omega0,
            gamma,
            eps_bar,
            n_in,
            n_amp,
        }
        .validate()
    }

    /// Mean thermal occupation of the two baths.
    pub fn n_th(&self) -> f64 {
        0.5 * (self.n_in + self.n_amp)
    }

    /// Normal-mode splitting from the bare resonance, `gamma * sqrt(eps (2 + eps))`.
    pub fn half_splitting(&self) -> f64 {
        self.gamma * (self.eps_bar * (2.0 + self.eps_bar)).sqrt()
    }

    pub fn resonances(&self) -> [f64; 2] {
        let s = self.half_splitting();
        [self.omega0 - s, self.omega0 + s]
    }
}

impl Validate for PtParams {
    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        finite(&mut v, "omega0", self.omega0);
        positive(&mut v, "gamma", self.gamma);
        positive(&mut v, "eps_bar", self.eps_bar);
        non_negative(&mut v, "n_in", self.n_in);
        non_negative(&mut v, "n_amp", self.n_amp);
        v
    }
}

/// Passive sensor: two lossy modes with dissipative coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassiveParams {
    pub omega0: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub eps: f64,
    pub n_a: f64,
    pub n_b: f64,
}

impl PassiveParams {
    pub fn new(omega0: f64, gamma_a: f64, gamma_b: f64, eps: f64, n_a: f64, n_b: f64) -> Result<Self> {
        Self {
            omega0,
            gamma_a,
            gamma_b,
            eps,
            n_a,
            n_b,
        }
        .validate()
    }

    pub fn coupling(&self) -> f64 {
        0.5 * (self.gamma_a - self.gamma_b).abs() * (1.0 + self.eps)
    }
}

impl Validate for PassiveParams {
    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        finite(&mut v, "omega0", self.omega0);
        positive(&mut v, "gamma_a", self.gamma_a);
        positive(&mut v, "gamma_b", self.gamma_b);
        above_minus_one(&mut v, "eps", self.eps);
        non_negative(&mut v, "n_a", self.n_a);
        non_negative(&mut v, "n_b", self.n_b);
        v
    }
}

/// Active sensor below or at threshold: lossy mode `a` (rate gamma), gain mode `b` (rate g).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveParams {
    pub omega0: f64,
    pub gamma: f64,
    pub g: f64,
    pub eps: f64,
    pub n_in: f64,
    pub n_amp: f64,
}

impl ActiveParams {
    pub fn new(omega0: f64, gamma: f64, g: f64, eps: f64, n_in: f64, n_amp: f64) -> Result<Self> {
        Self {
            omega0,
            gamma,
            g,
            eps,
            n_in,
            n_amp,
        }
        .validate()
    }

    pub fn coupling(&self) -> f64 {
        0.5 * (self.gamma + self.g) * (1.0 + self.eps)
    }
}

impl Validate for ActiveParams {
    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        finite(&mut v, "omega0", self.omega0);
        positive(&mut v, "gamma", self.gamma);
        if finite(&mut v, "g", self.g) {
            if self.g < 0.0 {
                v.push(Violation::new("g", "be >= 0", self.g));
            } else if self.gamma.is_finite() && self.g > self.gamma {
                v.push(Violation::new("g", format!("be <= gamma = {}", self.gamma), self.g));
            }
        }
        above_minus_one(&mut v, "eps", self.eps);
        non_negative(&mut v, "n_in", self.n_in);
        non_negative(&mut v, "n_amp", self.n_amp);
        v
    }
}

/// How the loop coupler transmissivity is calibrated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MuMode {
    /// Resonances placed exactly at the EP frequencies.
    #[default]
    Exact,
    /// First-order form `(1 + 2 eps) eta^2 / 4`.
    Linearized,
}

/// Delay-loop (non-Markovian) PT-symmetric sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopParams {
    pub eta: f64,
    pub tau: f64,
    pub eps: f64,
    pub omega0: f64,
    pub n_th: f64,
    pub mu_mode: MuMode,
}

impl LoopParams {
    pub fn new(eta: f64, tau: f64, eps: f64, omega0: f64, n_th: f64) -> Result<Self> {
        let p = Self {
            eta,
            tau,
            eps,
            omega0,
            n_th,
            mu_mode: MuMode::Exact,
        }
        .validate()?;
        p.check_commensurate()?;
        Ok(p)
    }

    /// Markovian-limit rate `eta / (2 tau)`.
    pub fn gamma(&self) -> f64 {
        self.eta / (2.0 * self.tau)
    }

    /// Round-trip phase of the EP resonances, `(eta/2) sqrt(eps (2 + eps))`.
    pub fn theta(&self) -> f64 {
        0.5 * self.eta * (self.eps * (2.0 + self.eps)).sqrt()
    }

    /// Requires `omega0 * tau` to be an integer multiple of 2 pi.
    pub fn check_commensurate(&self) -> Result<()> {
        check_commensurate(self.omega0, self.tau)
    }
}

pub(crate) fn check_commensurate(omega0: f64, tau: f64) -> Result<()> {
    let turns = omega0 * tau / TAU;
    if (turns - turns.round()).abs() > 1e-9 * turns.abs().max(1.0) {
        return Err(Error::Calibration(format!(
            "omega0 * tau = {} rad is not an integer multiple of 2 pi",
            omega0 * tau
        )));
    }
    Ok(())
}

impl Validate for LoopParams {
    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        open_unit(&mut v, "eta", self.eta);
        positive(&mut v, "tau", self.tau);
        non_negative(&mut v, "eps", self.eps);
        finite(&mut v, "omega0", self.omega0);
        non_negative(&mut v, "n_th", self.n_th);
        v
    }
}

/// Markovian phase-sensitive sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSensitiveParams {
    pub omega0: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub r: f64,
    pub eps_bar: f64,
    pub n_th: f64,
    /// Pump phase: angle of the amplified quadrature relative to the lab `q` axis.
    pub pump_phase: f64,
}

impl PhaseSensitiveParams {
    pub fn new(omega0: f64, gamma_a: f64, gamma_b: f64, r: f64, eps_bar: f64, n_th: f64) -> Result<Self> {
        Self {
            omega0,
            gamma_a,
            gamma_b,
            r,
            eps_bar,
            n_th,
            pump_phase: 0.0,
        }
        .validate()
    }

    /// Phase-insensitive gain rate fixed by balancing the amplitude quadrature.
    pub fn gamma_amp(&self) -> f64 {
        (self.gamma_a + self.gamma_b - self.r).max(0.0)
    }

    pub fn half_splitting(&self) -> f64 {
        self.gamma_a * (self.eps_bar * (2.0 + self.eps_bar)).sqrt()
    }

    pub fn resonances(&self) -> [f64; 2] {
        let s = self.half_splitting();
        [self.omega0 - s, self.omega0 + s]
    }
}

impl Validate for PhaseSensitiveParams {
    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        finite(&mut v, "omega0", self.omega0);
        positive(&mut v, "gamma_a", self.gamma_a);
        non_negative(&mut v, "gamma_b", self.gamma_b);
        if finite(&mut v, "r", self.r) {
            let bound = self.gamma_a + self.gamma_b;
            if self.r < 0.0 || (bound.is_finite() && self.r > bound) {
                v.push(Violation::new(
                    "r",
                    format!("satisfy 0 <= r <= gamma_a + gamma_b = {bound} (stability)"),
                    self.r,
                ));
            }
        }
        positive(&mut v, "eps_bar", self.eps_bar);
        non_negative(&mut v, "n_th", self.n_th);
        finite(&mut v, "pump_phase", self.pump_phase);
        v
    }
}

/// Delay-loop phase-sensitive sensor: the loop amplifier is followed by a single-mode squeezer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsLoopParams {
    pub eta: f64,
    pub tau: f64,
    pub eps: f64,
    pub omega0: f64,
    /// Squeezing parameter: the amplitude quadrature is scaled by `e^xi`, the phase quadrature by `e^-xi`.
    pub xi: f64,
    /// Phase-insensitive power gain. `None` derives it from the amplitude gain-loss balance.
    pub gain: Option<f64>,
    pub n_th: f64,
}

impl PsLoopParams {
    pub fn new(eta: f64, tau: f64, eps: f64, omega0: f64, xi: f64, n_th: f64) -> Result<Self> {
        let p = Self {
            eta,
            tau,
            eps,
            omega0,
            xi,
            gain: None,
            n_th,
        }
        .validate()?;
        check_commensurate(p.omega0, p.tau)?;
        p.calibrated_gain()?;
        Ok(p)
    }

    /// Squeezing that makes the loop purely phase sensitive (no phase-insensitive gain).
    pub fn pure_xi(eta: f64) -> f64 {
        -0.5 * (-eta).ln_1p()
    }

    /// Gain satisfying `e^xi sqrt(1 + G) sqrt(1 - eta) = 1`, or a calibration error when
    /// an explicit gain violates it or the squeezing exceeds the purely phase-sensitive value.
    pub fn calibrated_gain(&self) -> Result<f64> {
        let derived = ((-2.0 * self.xi).exp_m1() + self.eta) / (1.0 - self.eta);
        let tol = 1e-12 * (1.0 + self.eta / (1.0 - self.eta));
        if derived < -tol {
            return Err(Error::Calibration(format!(
                "xi = {} exceeds the purely phase-sensitive value {} for eta = {}",
                self.xi,
                Self::pure_xi(self.eta),
                self.eta
            )));
        }
        let derived = derived.max(0.0);
        if let Some(g) = self.gain {
            let balance = self.xi.exp() * (1.0 + g).sqrt() * (1.0 - self.eta).sqrt();
            if !(g >= 0.0) || (balance - 1.0).abs() > 1e-9 {
                return Err(Error::Calibration(format!(
                    "gain-loss balance e^xi sqrt(1+G) sqrt(1-eta) = {balance}, expected 1"
                )));
            }
            return Ok(g);
        }
        Ok(derived)
    }

    pub fn as_loop(&self) -> LoopParams {
        LoopParams {
            eta: self.eta,
            tau: self.tau,
            eps: self.eps,
            omega0: self.omega0,
            n_th: self.n_th,
            mu_mode: MuMode::Exact,
        }
    }
}

impl Validate for PsLoopParams {
    fn violations(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        open_unit(&mut v, "eta", self.eta);
        positive(&mut v, "tau", self.tau);
        non_negative(&mut v, "eps", self.eps);
        finite(&mut v, "omega0", self.omega0);
        finite(&mut v, "xi", self.xi);
        if let Some(g) = self.gain {
            non_negative(&mut v, "gain", g);
        }
        non_negative(&mut v, "n_th", self.n_th);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pt_zero_eps_is_rejected() {
        let err = PtParams::new(0.0, 1.0, 0.0, 0.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("eps_bar must be > 0"), "{err}");
    }

    #[test]
    fn all_violations_are_reported() {
        let p = PtParams {
            omega0: 0.0,
            gamma: -1.0,
            eps_bar: 0.0,
            n_in: -0.5,
            n_amp: f64::NAN,
        };
        match p.check() {
            Err(Error::Invalid(v)) => {
                let fields: Vec<_> = v.iter().map(|x| x.field).collect();
                assert_eq!(fields, ["gamma", "eps_bar", "n_in", "n_amp"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn active_threshold_is_inclusive() {
        assert!(ActiveParams::new(0.0, 1.0, 1.0, 0.1, 0.0, 0.0).is_ok());
        assert!(ActiveParams::new(0.0, 1.0, 1.0 + 1e-12, 0.1, 0.0, 0.0).is_err());
    }

    #[test]
    fn phase_sensitive_stability_bound_is_named() {
        let err = PhaseSensitiveParams::new(0.0, 1.0, 0.5, 1.6, 0.01, 0.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("r must satisfy 0 <= r <= gamma_a + gamma_b"), "{msg}");
        assert!(msg.contains("1.6"), "{msg}");
    }

    #[test]
    fn valid_record_is_returned_unchanged() {
        let p = PassiveParams {
            omega0: 3.0,
            gamma_a: 2.0,
            gamma_b: 1.0,
            eps: 0.02,
            n_a: 0.1,
            n_b: 0.0,
        };
        assert_eq!(p.validate().unwrap(), p);
    }

    #[test]
    fn n_th_is_mean_of_baths() {
        let p = PtParams::new(0.0, 1.0, 0.1, 0.3, 0.7).unwrap();
        assert_eq!(p.n_th(), 0.5);
    }

    #[test]
    fn loop_requires_commensurate_omega0() {
        assert!(LoopParams::new(0.01, 0.5, 0.01, 4.0 * TAU, 0.0).is_ok());
        assert!(matches!(
            LoopParams::new(0.01, 0.5, 0.01, 1.0, 0.0),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn loop_gain_loss_identity() {
        for i in 1..100 {
            let eta = i as f64 / 100.0;
            let g = eta / (1.0 - eta);
            assert!(((1.0 + g).sqrt() * (1.0 - eta).sqrt() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn ps_loop_gain_calibration() {
        let eta = 0.1;
        let pure = PsLoopParams::new(eta, 1.0, 0.01, 0.0, PsLoopParams::pure_xi(eta), 0.0).unwrap();
        assert_eq!(pure.calibrated_gain().unwrap(), 0.0);
        let none = PsLoopParams::new(eta, 1.0, 0.01, 0.0, 0.0, 0.0).unwrap();
        assert!((none.calibrated_gain().unwrap() - eta / (1.0 - eta)).abs() < 1e-15);
        let mut bad = none;
        bad.gain = Some(0.2);
        assert!(matches!(bad.calibrated_gain(), Err(Error::Calibration(_))));
        assert!(PsLoopParams::new(eta, 1.0, 0.01, 0.0, 0.1, 0.0).is_err());
    }
}
