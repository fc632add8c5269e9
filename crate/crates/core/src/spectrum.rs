//! Frequency grids, spectra, and transfer-function containers.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    /// Amplitude quadrature `q = sqrt(2) Re a`.
    Q,
    /// Phase quadrature `p = sqrt(2) Im a`.
    P,
}

impl Quadrature {
    pub fn label(self) -> &'static str {
        match self {
            Quadrature::Q => "q",
            Quadrature::P => "p",
        }
    }
}

/// Input channel of a transfer function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    /// Vacuum/thermal input of the out-coupled mode.
    In,
    /// Noise of the amplifier (enters conjugated for phase-insensitive gain).
    Amp,
    /// Loss-port input of the second mode.
    BIn,
    /// Perturbation fluctuation `delta eps` transduced by the carrier at `Omega_-`.
    EpsMinus,
    /// Same, carrier at `Omega_+`.
    EpsPlus,
}

impl Channel {
    pub fn label(self) -> &'static str {
        match self {
            Channel::In => "in",
            Channel::Amp => "amp",
            Channel::BIn => "b_in",
            Channel::EpsMinus => "eps_minus",
            Channel::EpsPlus => "eps_plus",
        }
    }
}

/// Strictly increasing angular-frequency grid (rad/s).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.iter().any(|x| !x.is_finite()) {
            return Err(Error::Shape("grid points must be finite".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Shape("grid must be strictly increasing".into()));
        }
        Ok(Self(points))
    }

    pub fn linear(min: f64, max: f64, n: usize) -> Result<Self> {
        match n {
            0 => Self::new(Vec::new()),
            1 => Self::new(vec![min]),
            _ => {
                let step = (max - min) / (n - 1) as f64;
                Self::new(
                    (0..n)
                        .map(|k| if k == n - 1 { max } else { min + step * k as f64 })
                        .collect(),
                )
            }
        }
    }

    pub fn log(min: f64, max: f64, n: usize) -> Result<Self> {
        if !(min > 0.0 && max > 0.0) {
            return Err(Error::Shape(format!(
                "log grid needs positive bounds (got {min}, {max})"
            )));
        }
        let mut pts: Vec<f64> = Self::linear(min.ln(), max.ln(), n)?.0.iter().map(|x| x.exp()).collect();
        if n > 0 {
            pts[0] = min;
        }
        if n > 1 {
            pts[n - 1] = max;
        }
        Self::new(pts)
    }

    pub fn points(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

/// Double-sided symmetrized PSD sampled on a grid (vacuum = 1/2 per quadrature).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl Spectrum {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Shape(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        Grid::new(grid.clone())?;
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::Shape(format!(
                "spectrum values must be finite and >= 0 (got {v})"
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Linear interpolation, clamped to the end values outside the grid.
    pub fn interpolate(&self, x: f64) -> f64 {
        let g = &self.grid;
        if g.is_empty() {
            return 0.0;
        }
        if x <= g[0] {
            return self.values[0];
        }
        if x >= g[g.len() - 1] {
            return self.values[g.len() - 1];
        }
        let k = g.partition_point(|&v| v <= x);
        let (x0, x1) = (g[k - 1], g[k]);
        let t = (x - x0) / (x1 - x0);
        self.values[k - 1] * (1.0 - t) + self.values[k] * t
    }

    /// Pointwise sum of two spectra on the same grid.
    pub fn add(&self, other: &Spectrum) -> Result<Spectrum> {
        if self.grid != other.grid {
            return Err(Error::Shape("spectra are sampled on different grids".into()));
        }
        Ok(Spectrum {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }
}

/// Complex gains from each input channel to an output quadrature (or to the field).
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunctionSet {
    pub grid: Vec<f64>,
    pub quadrature: Option<Quadrature>,
    pub channels: Vec<(Channel, Vec<Complex64>)>,
}

impl TransferFunctionSet {
    pub fn get(&self, channel: Channel) -> Option<&[Complex64]> {
        self.channels
            .iter()
            .find(|(c, _)| *c == channel)
            .map(|(_, v)| v.as_slice())
    }

    /// Noise spectrum `sum |H_c|^2 S_c` for independent channels with the given input PSDs.
    pub fn noise_spectrum(&self, inputs: &[(Channel, f64)]) -> Result<Spectrum> {
        let mut values = vec![0.0; self.grid.len()];
        for (c, s) in inputs {
            let h = self
                .get(*c)
                .ok_or_else(|| Error::Shape(format!("no channel {}", c.label())))?;
            for (v, h) in values.iter_mut().zip(h) {
                *v += h.norm_sqr() * s;
            }
        }
        Spectrum::new(self.grid.clone(), values)
    }
}

/// Rejects `omega` within `tol` of any of `resonances`.
pub fn pole_guard(omega: f64, resonances: &[f64], tol: f64) -> Result<()> {
    for &r in resonances {
        let d = (omega - r).abs();
        if d <= tol {
            return Err(Error::Pole {
                omega,
                resonance: r,
                distance: d,
            });
        }
    }
    Ok(())
}

/// Relative distance below which library calls report a pole, in units of the model's rate.
pub const POLE_TOLERANCE: f64 = 1e-9;
