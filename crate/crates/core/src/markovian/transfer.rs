//! Transfer functions of the Markovian sensors in the frame rotating at `omega0`.
//!
//! Kernels take a complex detuning `z`; real `z = omega - omega0` gives the physical gains and
//! `z + i gamma_reg` the gains of the same model with both modes damped by `gamma_reg`.

use num_complex::Complex64;

use crate::error::Result;
use crate::mean_field::{CarrierQuadrature, MeanField};
use crate::params::{ActiveParams, PassiveParams, PtParams, Validate};
use crate::spectrum::{pole_guard, Channel, Grid, Quadrature, TransferFunctionSet, POLE_TOLERANCE};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `(H_a, H_b)` of the passive sensor: output of mode `a` from the inputs of `a` and `b`.
pub fn passive_gains(gamma_a: f64, gamma_b: f64, eps: f64, z: Complex64) -> (Complex64, Complex64) {
    let k = 0.5 * (gamma_a - gamma_b).abs() * (1.0 + eps);
    let det = (gamma_a - I * z) * (gamma_b - I * z) + k * k;
    (
        2.0 * gamma_a * (gamma_b - I * z) / det - 1.0,
        2.0 * k * (gamma_a * gamma_b).sqrt() / det,
    )
}

/// `(H_in, H_amp)` of the active sensor for the amplitude quadrature; the phase quadrature
/// flips the sign of `H_amp`.
pub fn active_gains(gamma: f64, g: f64, eps: f64, z: Complex64) -> (Complex64, Complex64) {
    let k = 0.5 * (gamma + g) * (1.0 + eps);
    let det = (gamma - I * z) * (g + I * z) - k * k;
    (
        2.0 * gamma * (g + I * z) / det - 1.0,
        -2.0 * k * (gamma * g).sqrt() / det,
    )
}

/// Gains of one output quadrature of the PT-symmetric sensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PtGains {
    pub h_in: Complex64,
    pub h_amp: Complex64,
    /// Gain from `delta eps` at baseband `z - s` (carrier at `Omega_+`) and `z + s` (carrier at `Omega_-`).
    pub eps_plus: Complex64,
    pub eps_minus: Complex64,
}

pub fn pt_gains(gamma: f64, eps: f64, z: Complex64, x: Quadrature, carrier: Option<&CarrierQuadrature>) -> PtGains {
    let s2 = gamma * gamma * eps * (2.0 + eps);
    let d = z * z - s2;
    let k = (1.0 + eps) * gamma;
    let sign = match x {
        Quadrature::Q => -1.0,
        Quadrature::P => 1.0,
    };
    let (eps_minus, eps_plus) = match carrier {
        Some(c) => {
            let pre = std::f64::consts::SQRT_2 * gamma.powf(1.5);
            let gain = |xa: Complex64, xb: Complex64| pre * (k * xa + xb * (gamma + I * z)) / d;
            (gain(c.a_minus, c.b_minus), gain(c.a_plus, c.b_plus))
        }
        None => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
    };
    PtGains {
        h_in: 2.0 * gamma * (gamma + I * z) / d - 1.0,
        h_amp: sign * 2.0 * k * gamma / d,
        eps_plus,
        eps_minus,
    }
}

pub fn passive_transfer_functions(p: &PassiveParams, grid: &Grid) -> Result<TransferFunctionSet> {
    p.check()?;
    let (ha, hb): (Vec<_>, Vec<_>) = grid
        .points()
        .iter()
        .map(|&w| passive_gains(p.gamma_a, p.gamma_b, p.eps, (w - p.omega0).into()))
        .unzip();
    Ok(TransferFunctionSet {
        grid: grid.points().to_vec(),
        quadrature: None,
        channels: vec![(Channel::In, ha), (Channel::BIn, hb)],
    })
}

/// Real-axis poles of the active sensor; only present at threshold `g = gamma`.
pub fn active_real_poles(p: &ActiveParams) -> Vec<f64> {
    if p.g == p.gamma {
        let s = 0.5 * (p.gamma + p.g) * (p.eps * (2.0 + p.eps)).sqrt();
        vec![p.omega0 - s, p.omega0 + s]
    } else {
        Vec::new()
    }
}

pub fn active_transfer_functions(p: &ActiveParams, grid: &Grid, x: Quadrature) -> Result<TransferFunctionSet> {
    p.check()?;
    let poles = active_real_poles(p);
    let sign = if x == Quadrature::P { -1.0 } else { 1.0 };
    let mut hin = Vec::with_capacity(grid.len());
    let mut hamp = Vec::with_capacity(grid.len());
    for &w in grid.points() {
        pole_guard(w, &poles, POLE_TOLERANCE * p.gamma)?;
        let (a, b) = active_gains(p.gamma, p.g, p.eps, (w - p.omega0).into());
        hin.push(a);
        hamp.push(sign * b);
    }
    Ok(TransferFunctionSet {
        grid: grid.points().to_vec(),
        quadrature: Some(x),
        channels: vec![(Channel::In, hin), (Channel::Amp, hamp)],
    })
}

/// All channel gains of output quadrature `x`, with `delta eps` transduced by the carriers in `mean`.
pub fn pt_output_quadrature_relation(
    p: &PtParams,
    mean: &MeanField,
    grid: &Grid,
    x: Quadrature,
) -> Result<TransferFunctionSet> {
    p.check()?;
    let poles = p.resonances();
    let carrier = mean.quadrature(x);
    let mut cols: [Vec<Complex64>; 4] = Default::default();
    for &w in grid.points() {
        pole_guard(w, &poles, POLE_TOLERANCE * p.gamma)?;
        let g = pt_gains(p.gamma, p.eps_bar, (w - p.omega0).into(), x, Some(&carrier));
        for (col, v) in cols.iter_mut().zip([g.h_in, g.h_amp, g.eps_minus, g.eps_plus]) {
            col.push(v);
        }
    }
    let [hin, hamp, em, ep] = cols;
    Ok(TransferFunctionSet {
        grid: grid.points().to_vec(),
        quadrature: Some(x),
        channels: vec![
            (Channel::In, hin),
            (Channel::Amp, hamp),
            (Channel::EpsMinus, em),
            (Channel::EpsPlus, ep),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn passive_on_resonance_without_coupling() {
        // gamma_a = gamma_b = 1, eps = 0: the modes decouple and H_a = 2 gamma_a / gamma_a - 1 = 1.
        let (ha, hb) = passive_gains(1.0, 1.0, 0.0, 0.0.into());
        assert_eq!(ha, Complex64::new(1.0, 0.0));
        assert_eq!(hb, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn passive_far_off_resonance() {
        let (ha, hb) = passive_gains(2.0, 0.5, 0.1, 1e9.into());
        assert!((ha + 1.0).norm() < 1e-8);
        assert!(hb.norm() < 1e-8);
    }

    #[test]
    fn passive_is_lossless() {
        for &(ga, gb, eps, z) in &[(2.0, 1.0, 0.02, 0.3), (0.1, 3.0, 0.5, -2.0), (1.0, 1.0, 0.0, 0.7)] {
            let (ha, hb) = passive_gains(ga, gb, eps, Complex64::from(z));
            assert!((ha.norm_sqr() + hb.norm_sqr() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn active_far_off_resonance() {
        let (h, a) = active_gains(1.0, 0.5, 0.01, 1e9.into());
        assert!((h + 1.0).norm() < 1e-8);
        assert!(a.norm() < 1e-8);
    }

    #[test]
    fn pt_pole_is_reported() {
        let p = PtParams::new(5.0, 1.0, 0.01, 0.0, 0.0).unwrap();
        let m = MeanField::from_carriers(1.0, 0.01, 1.0.into(), 1.0.into());
        let grid = Grid::new(vec![p.resonances()[1]]).unwrap();
        let err = pt_output_quadrature_relation(&p, &m, &grid, Quadrature::P).unwrap_err();
        match err {
            Error::Pole { resonance, .. } => assert_eq!(resonance, p.resonances()[1]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn no_carrier_no_transduction() {
        let p = PtParams::new(0.0, 1.0, 0.01, 0.0, 0.0).unwrap();
        let m = MeanField::from_carriers(1.0, 0.01, 0.0.into(), 0.0.into());
        let grid = Grid::new(vec![0.05, 0.3]).unwrap();
        let tf = pt_output_quadrature_relation(&p, &m, &grid, Quadrature::Q).unwrap();
        assert!(tf.get(Channel::EpsPlus).unwrap().iter().all(|g| g.norm() == 0.0));
        assert!(tf.get(Channel::EpsMinus).unwrap().iter().all(|g| g.norm() == 0.0));
    }

    #[test]
    fn active_threshold_pole() {
        let p = ActiveParams::new(0.0, 1.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let grid = Grid::new(vec![0.0]).unwrap();
        assert!(matches!(
            active_transfer_functions(&p, &grid, Quadrature::Q),
            Err(Error::Pole { .. })
        ));
    }
}
