//! Run configuration. Every physical quantity carries its unit in the key name.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    Passive,
    Active,
    Pt,
    Loop,
    Ps,
    PsLoop,
}

impl ModelId {
    pub fn name(self) -> &'static str {
        match self {
            ModelId::Passive => "passive",
            ModelId::Active => "active",
            ModelId::Pt => "pt",
            ModelId::Loop => "loop",
            ModelId::Ps => "ps",
            ModelId::PsLoop => "ps_loop",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// Origin of the grid coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridReference {
    #[default]
    Absolute,
    Omega0,
    ResonancePlus,
    ResonanceMinus,
}

/// Model parameters. Rates and frequencies are angular (rad/s), times in seconds,
/// occupations in quanta, carrier amplitudes in sqrt(quanta).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_a_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_b_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_rad_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_in: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_amp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_th: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump_phase_rad: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carrier_plus_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carrier_plus_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carrier_minus_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carrier_minus_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_omega_meas_rad_s: Option<f64>,
    /// Offset from each resonance at which the exact imprecision pipeline samples the spectrum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset_rad_s: Option<f64>,
}

/// Names accepted in `[params]` and as sweep axes, in column order.
pub const PARAM_KEYS: [&str; 22] = [
    "omega0_rad_s",
    "gamma_rad_s",
    "gamma_a_rad_s",
    "gamma_b_rad_s",
    "g_rad_s",
    "r_rad_s",
    "eps",
    "n_in",
    "n_amp",
    "n_a",
    "n_b",
    "n_th",
    "eta",
    "tau_s",
    "xi",
    "pump_phase_rad",
    "carrier_plus_re",
    "carrier_plus_im",
    "carrier_minus_re",
    "carrier_minus_im",
    "delta_omega_meas_rad_s",
    "offset_rad_s",
];

impl Params {
    fn slot(&mut self, key: &str) -> Option<&mut Option<f64>> {
        Some(match key {
            "omega0_rad_s" => &mut self.omega0_rad_s,
            "gamma_rad_s" => &mut self.gamma_rad_s,
            "gamma_a_rad_s" => &mut self.gamma_a_rad_s,
            "gamma_b_rad_s" => &mut self.gamma_b_rad_s,
            "g_rad_s" => &mut self.g_rad_s,
            "r_rad_s" => &mut self.r_rad_s,
            "eps" => &mut self.eps,
            "n_in" => &mut self.n_in,
            "n_amp" => &mut self.n_amp,
            "n_a" => &mut self.n_a,
            "n_b" => &mut self.n_b,
            "n_th" => &mut self.n_th,
            "eta" => &mut self.eta,
            "tau_s" => &mut self.tau_s,
            "xi" => &mut self.xi,
            "pump_phase_rad" => &mut self.pump_phase_rad,
            "carrier_plus_re" => &mut self.carrier_plus_re,
            "carrier_plus_im" => &mut self.carrier_plus_im,
            "carrier_minus_re" => &mut self.carrier_minus_re,
            "carrier_minus_im" => &mut self.carrier_minus_im,
            "delta_omega_meas_rad_s" => &mut self.delta_omega_meas_rad_s,
            "offset_rad_s" => &mut self.offset_rad_s,
            _ => return None,
        })
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.clone().slot(key).and_then(|v| *v)
    }

    pub fn set(&mut self, key: &str, value: f64) -> anyhow::Result<()> {
        match self.slot(key) {
            Some(slot) => {
                *slot = Some(value);
                Ok(())
            }
            None => bail!("unknown parameter `{key}`"),
        }
    }

    /// `(key, value)` for every parameter that is set.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        PARAM_KEYS.iter().filter_map(|&k| self.get(k).map(|v| (k, v))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min_rad_s: f64,
    pub max_rad_s: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
    #[serde(default)]
    pub reference: GridReference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub param: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl SweepAxis {
    pub fn values(&self) -> anyhow::Result<Vec<f64>> {
        axis_values(self.min, self.max, self.points, self.scale).with_context(|| format!("sweep axis `{}`", self.param))
    }
}

pub fn axis_values(min: f64, max: f64, points: usize, scale: Scale) -> anyhow::Result<Vec<f64>> {
    if points == 0 {
        bail!("points must be >= 1");
    }
    if !(min.is_finite() && max.is_finite()) || max < min {
        bail!("range [{min}, {max}] must be finite with min <= max");
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let t = |k: usize| k as f64 / (points - 1) as f64;
    Ok(match scale {
        Scale::Linear => (0..points).map(|k| min + (max - min) * t(k)).collect(),
        Scale::Log => {
            if min <= 0.0 {
                bail!("log scale needs min > 0 (got {min})");
            }
            let (a, b) = (min.ln(), max.ln());
            let mut v: Vec<f64> = (0..points).map(|k| (a + (b - a) * t(k)).exp()).collect();
            // pin the endpoints so that configured bounds appear verbatim
            v[0] = min;
            v[points - 1] = max;
            v
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowId {
    #[default]
    Hann,
    Rectangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureId {
    Q,
    #[default]
    P,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    pub dt_s: f64,
    pub duration_s: f64,
    #[serde(default = "default_segments")]
    pub segments: usize,
    #[serde(default)]
    pub window: WindowId,
    #[serde(default)]
    pub gamma_reg_rad_s: f64,
    #[serde(default)]
    pub burn_in_s: f64,
    #[serde(default = "default_decimation")]
    pub decimation: usize,
    #[serde(default)]
    pub quadrature: QuadratureId,
    /// Offsets from `Omega_+` at which the sidecar reports analytic and simulated values.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub offsets_rad_s: Vec<f64>,
}

fn default_segments() -> usize {
    16
}

fn default_decimation() -> usize {
    1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepTarget {
    Eigen,
    Tf,
    Spectrum,
    Freqnoise,
    Imprecision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelId,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    /// Computation repeated at every point of the `sweep` subcommand.
    #[serde(default = "default_sweep_target")]
    pub sweep_target: SweepTarget,
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepAxis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimSpec>,
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_sweep_target() -> SweepTarget {
    SweepTarget::Imprecision
}

impl RunConfig {
    pub fn parse(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization. The output directory is left out, so the same
    /// run written to two places produces identical files.
    pub fn sha256(&self) -> String {
        let canonical = RunConfig {
            out_dir: default_out_dir(),
            ..self.clone()
        };
        let digest = Sha256::digest(canonical.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn check(&self) -> anyhow::Result<()> {
        if self.sweep.len() > 2 {
            bail!("at most 2 sweep axes are supported (got {})", self.sweep.len());
        }
        for axis in &self.sweep {
            if !PARAM_KEYS.contains(&axis.param.as_str()) {
                bail!("sweep axis names unknown parameter `{}`", axis.param);
            }
            axis.values()?;
        }
        if let Some(g) = &self.grid {
            axis_values(g.min_rad_s, g.max_rad_s, g.points, g.scale).context("grid")?;
        }
        Ok(())
    }

    /// Parameter sets of the sweep in row-major order (first axis outermost).
    pub fn points(&self) -> anyhow::Result<Vec<Params>> {
        let mut points = vec![self.params.clone()];
        for axis in &self.sweep {
            let values = axis.values()?;
            let mut next = Vec::with_capacity(points.len() * values.len());
            for p in &points {
                for &v in &values {
                    let mut q = p.clone();
                    q.set(&axis.param, v)?;
                    next.push(q);
                }
            }
            points = next;
        }
        Ok(points)
    }

    pub fn sweep_keys(&self) -> Vec<&str> {
        self.sweep.iter().map(|a| a.param.as_str()).collect()
    }
}
