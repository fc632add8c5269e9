//! Subcommand implementations. Each sweep point is evaluated independently on the worker
//! pool and results are emitted in point order.

use rayon::prelude::*;
use serde_json::{json, Value};

use epsense_core::estimation::{
    imprecision, imprecision_exact, imprecision_leading_order, sensitivity, ImprecisionReport,
};
use epsense_core::loop_model::{
    freq_noise_nonmarkovian, loop_output_spectrum, loop_spectrum_at, loop_spectrum_near_resonance,
    loop_transfer_functions,
};
use epsense_core::markovian::spectra::passive_thermal_spectrum;
use epsense_core::markovian::spectra::pt_spectrum_at;
use epsense_core::markovian::transfer::{passive_gains, pt_output_quadrature_relation};
use epsense_core::markovian::{
    active_eigenfrequencies, active_transfer_functions, frequency_noise_spectrum, passive_eigenfrequencies,
    pt_eigenfrequencies, pt_frequency_noise, pt_output_spectrum_exact, pt_output_spectrum_near_resonance, EigenPair,
};
use epsense_core::phase_sensitive::{
    ps_imprecision, ps_loop_gains, ps_loop_near_resonance, ps_loop_pure_near_resonance, ps_lossy_near_resonance,
    ps_nonmarkovian_quadrature_tfs, ps_output_spectrum, ps_pure_near_resonance, ps_quadrature_eigenvalues,
    ps_transfer_functions,
};
use epsense_core::stochastic::{
    mix_seed, simulate_loop, simulate_passive, simulate_ps_loop, simulate_pt_markovian, welch_psd, SimConfig,
    TimeSeries, Window,
};
use epsense_core::{Channel, Complex64, Grid, PsLoopParams, PtParams, Quadrature, Spectrum, TransferFunctionSet};

use crate::config::{axis_values, ModelId, Params, QuadratureId, RunConfig, SimSpec, SweepTarget, WindowId};
use crate::exit::{Failure, POLE};
use crate::model::{carrier_plus, require, Model};
use crate::output::{Cell, Column, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Formula {
    Exact,
    NearResonance,
    #[default]
    Both,
}

impl Formula {
    fn exact(self) -> bool {
        self != Formula::NearResonance
    }

    fn near(self) -> bool {
        self != Formula::Exact
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub formula: Formula,
    pub pole_guard: bool,
}

/// A finished table plus its sidecar records.
pub type Output = (Table, Vec<Value>);

#[derive(Default)]
struct PointOut {
    rows: Vec<Vec<Cell>>,
    sidecar: Vec<Value>,
    excluded: usize,
    /// Rows for a secondary table.
    extra: Vec<Row>,
}

type Row = Vec<Cell>;

fn sweep_columns(cfg: &RunConfig) -> Vec<Column> {
    cfg.sweep_keys().into_iter().map(Column::inferred).collect()
}

fn sweep_cells(cfg: &RunConfig, p: &Params) -> Row {
    cfg.sweep_keys()
        .into_iter()
        .map(|k| Cell::Num(p.get(k).unwrap_or(f64::NAN)))
        .collect()
}

/// Evaluates `f` at every sweep point in parallel; the first failing point (in order) wins.
fn for_points<F>(cfg: &RunConfig, f: F) -> Result<Vec<PointOut>, Failure>
where
    F: Fn(usize, &Params) -> Result<PointOut, Failure> + Sync,
{
    let points = cfg.points()?;
    let results: Vec<Result<PointOut, Failure>> = points.par_iter().enumerate().map(|(i, p)| f(i, p)).collect();
    results.into_iter().collect()
}

fn assemble(mut table: Table, outs: Vec<PointOut>) -> Output {
    let mut sidecar = Vec::new();
    let mut excluded = 0;
    for o in outs {
        table.rows.extend(o.rows);
        sidecar.extend(o.sidecar);
        excluded += o.excluded;
    }
    if excluded > 0 {
        table
            .notes
            .push(format!("{excluded} grid points excluded by the pole guard"));
    }
    (table, sidecar)
}

fn summary_record(table: &Table, cfg: &RunConfig, excluded: usize) -> Value {
    json!({
        "tool": crate::output::TOOL,
        "command": table.command,
        "model": table.model.name(),
        "formula_ids": table.formula_ids,
        "rows": table.rows.len(),
        "pole_guard_excluded": excluded,
        "seed": cfg.seed,
        "config_sha256": cfg.sha256(),
    })
}

/// Grid of absolute frequencies for a point, with pole-guarded entries removed.
fn point_grid(cfg: &RunConfig, model: &Model, opts: &Options) -> Result<(Grid, usize), Failure> {
    let grid_spec = cfg
        .grid
        .as_ref()
        .ok_or_else(|| Failure::validation("this command needs a [grid] table"))?;
    let origin = model.grid_origin(grid_spec.reference)?;
    let mut kept = Vec::new();
    let mut excluded = 0;
    for v in axis_values(
        grid_spec.min_rad_s,
        grid_spec.max_rad_s,
        grid_spec.points,
        grid_spec.scale,
    )? {
        let w = origin + v;
        if model.near_pole(w)? {
            if opts.pole_guard {
                excluded += 1;
                continue;
            }
            return Err(Failure::new(
                POLE,
                format!("omega = {w} rad/s lies inside the pole guard of a resonance; enable the pole guard or move the grid"),
            ));
        }
        kept.push(w);
    }
    Ok((Grid::new(kept)?, excluded))
}

fn nearest_offset(model: &Model, w: f64) -> Result<f64, Failure> {
    let res = model
        .resonances()?
        .ok_or_else(|| Failure::validation("near-resonance forms need a model with real resonances"))?;
    let (a, b) = (w - res[0], w - res[1]);
    Ok(if a.abs() < b.abs() { a } else { b })
}

// ---------------------------------------------------------------- eigen

fn eigen_rows(id: ModelId, p: &Params) -> Result<Vec<(&'static str, EigenPair)>, Failure> {
    let omega0 = p.get("omega0_rad_s").unwrap_or(0.0);
    let real = |r: [f64; 2]| EigenPair {
        omega_minus: r[0].into(),
        omega_plus: r[1].into(),
    };
    Ok(match id {
        ModelId::Pt => {
            // the EP itself (eps = 0) is a valid eigenvalue query
            let q = PtParams {
                omega0,
                gamma: require(p, "gamma_rad_s", id)?,
                eps_bar: require(p, "eps", id)?,
                n_in: 0.0,
                n_amp: 0.0,
            };
            vec![("field", pt_eigenfrequencies(&q)?)]
        }
        ModelId::Passive | ModelId::Active | ModelId::Loop | ModelId::PsLoop | ModelId::Ps => {
            match Model::build(id, p)? {
                Model::Passive(q) => vec![("field", passive_eigenfrequencies(&q)?)],
                Model::Active(q) => vec![("field", active_eigenfrequencies(&q)?)],
                Model::Ps(q, _) => {
                    let e = ps_quadrature_eigenvalues(&q)?;
                    let to_freq = |l: [Complex64; 2]| {
                        let (a, b) = (omega0 + Complex64::i() * l[0], omega0 + Complex64::i() * l[1]);
                        let (lo, hi) = if (a.re, a.im) <= (b.re, b.im) { (a, b) } else { (b, a) };
                        EigenPair {
                            omega_minus: lo,
                            omega_plus: hi,
                        }
                    };
                    vec![("q", to_freq(e.amplitude_pair)), ("p", to_freq(e.phase_pair))]
                }
                m => vec![("field", real(m.resonances()?.expect("loops have real resonances")))],
            }
        }
    })
}

pub fn eigen(cfg: &RunConfig) -> Result<Output, Failure> {
    let points = cfg.points()?;
    let keys: Vec<&'static str> = points[0].entries().into_iter().map(|(k, _)| k).collect();
    let mut cols = vec![Column::new("model", "-")];
    cols.extend(keys.iter().map(|k| Column::inferred(k)));
    cols.push(Column::new("quadrature", "-"));
    for c in ["re_omega_minus", "im_omega_minus", "re_omega_plus", "im_omega_plus"] {
        cols.push(Column::new(c, "rad/s"));
    }
    cols.push(Column::new("splitting_rad_s", "rad/s"));
    let mut table = Table::new("eigen", "eigen", cfg.model, cols);
    table
        .formula_ids
        .push(format!("eigen.{}.closed_form", cfg.model.name()));
    let outs = for_points(cfg, |_, p| {
        let mut out = PointOut::default();
        for (quad, e) in eigen_rows(cfg.model, p)? {
            let mut row: Row = vec![cfg.model.name().into()];
            row.extend(keys.iter().map(|k| Cell::Num(p.get(k).unwrap_or(f64::NAN))));
            row.push(quad.into());
            for v in [e.omega_minus.re, e.omega_minus.im, e.omega_plus.re, e.omega_plus.im] {
                row.push(v.into());
            }
            row.push(e.splitting().re.into());
            out.rows.push(row);
        }
        Ok(out)
    })?;
    let (table, _) = assemble(table, outs);
    let record = summary_record(&table, cfg, 0);
    Ok((table, vec![record]))
}

// ---------------------------------------------------------------- transfer functions

fn transfer_sets(model: &Model, grid: &Grid) -> Result<Vec<(&'static str, TransferFunctionSet)>, Failure> {
    Ok(match model {
        Model::Passive(p) => {
            let (mut ha, mut hb) = (Vec::new(), Vec::new());
            for &w in grid.points() {
                let (a, b) = passive_gains(p.gamma_a, p.gamma_b, p.eps, (w - p.omega0).into());
                ha.push(a);
                hb.push(b);
            }
            vec![(
                "field",
                TransferFunctionSet {
                    grid: grid.points().to_vec(),
                    quadrature: None,
                    channels: vec![(Channel::In, ha), (Channel::BIn, hb)],
                },
            )]
        }
        Model::Active(p) => vec![
            ("q", active_transfer_functions(p, grid, Quadrature::Q)?),
            ("p", active_transfer_functions(p, grid, Quadrature::P)?),
        ],
        Model::Pt(p, m) => vec![
            ("q", pt_output_quadrature_relation(p, m, grid, Quadrature::Q)?),
            ("p", pt_output_quadrature_relation(p, m, grid, Quadrature::P)?),
        ],
        Model::Loop(p, _) => vec![
            ("q", loop_transfer_functions(p, grid, Quadrature::Q)?),
            ("p", loop_transfer_functions(p, grid, Quadrature::P)?),
        ],
        Model::Ps(p, _) => vec![
            ("q", ps_transfer_functions(p, grid, Quadrature::Q)?),
            ("p", ps_transfer_functions(p, grid, Quadrature::P)?),
        ],
        Model::PsLoop(p) => {
            let (q, pp) = ps_nonmarkovian_quadrature_tfs(p, grid)?;
            vec![("q", q), ("p", pp)]
        }
    })
}

pub fn tf(cfg: &RunConfig, opts: &Options) -> Result<Output, Failure> {
    let mut cols = sweep_columns(cfg);
    cols.push(Column::new("omega", "rad/s"));
    cols.push(Column::new("quadrature", "-"));
    cols.push(Column::new("channel", "-"));
    for c in ["re_h", "im_h", "abs_h"] {
        cols.push(Column::new(c, "1"));
    }
    let mut table = Table::new("tf", "tf", cfg.model, cols);
    table.formula_ids.push(format!("tf.{}.exact", cfg.model.name()));
    let outs = for_points(cfg, |_, p| {
        let model = Model::build(cfg.model, p)?;
        let (grid, excluded) = point_grid(cfg, &model, opts)?;
        let mut out = PointOut {
            excluded,
            ..Default::default()
        };
        let prefix = sweep_cells(cfg, p);
        let sets = transfer_sets(&model, &grid)?;
        for (k, &w) in grid.points().iter().enumerate() {
            for (quad, set) in &sets {
                for (ch, h) in &set.channels {
                    let h = h[k];
                    let mut row = prefix.clone();
                    row.extend([
                        w.into(),
                        (*quad).into(),
                        ch.label().into(),
                        h.re.into(),
                        h.im.into(),
                        h.norm().into(),
                    ]);
                    out.rows.push(row);
                }
            }
        }
        Ok(out)
    })?;
    let excluded = outs.iter().map(|o| o.excluded).sum();
    let (table, _) = assemble(table, outs);
    let record = summary_record(&table, cfg, excluded);
    Ok((table, vec![record]))
}

// ---------------------------------------------------------------- spectra

fn exact_spectra(model: &Model, grid: &Grid) -> Result<(Spectrum, Spectrum), Failure> {
    Ok(match model {
        Model::Passive(p) => {
            let s = passive_thermal_spectrum(p, grid)?;
            (s.clone(), s)
        }
        Model::Active(p) => {
            let inputs = [(Channel::In, 0.5 + p.n_in), (Channel::Amp, 0.5 + p.n_amp)];
            (
                active_transfer_functions(p, grid, Quadrature::Q)?.noise_spectrum(&inputs)?,
                active_transfer_functions(p, grid, Quadrature::P)?.noise_spectrum(&inputs)?,
            )
        }
        Model::Pt(p, _) => (
            pt_output_spectrum_exact(p, grid, Quadrature::Q)?,
            pt_output_spectrum_exact(p, grid, Quadrature::P)?,
        ),
        Model::Loop(p, _) => {
            let s = loop_output_spectrum(p, grid)?;
            (s.clone(), s)
        }
        Model::Ps(p, _) => (
            ps_output_spectrum(p, grid, Quadrature::Q)?,
            ps_output_spectrum(p, grid, Quadrature::P)?,
        ),
        Model::PsLoop(p) => {
            let n = 0.5 + p.n_th;
            let (q, pp) = ps_nonmarkovian_quadrature_tfs(p, grid)?;
            let inputs = [(Channel::In, n), (Channel::Amp, n)];
            (q.noise_spectrum(&inputs)?, pp.noise_spectrum(&inputs)?)
        }
    })
}

fn near_formula_id(model: &Model) -> Option<String> {
    let tag = match model {
        Model::Pt(..) => "spectrum.pt.near_resonance",
        Model::Loop(..) => "spectrum.loop.near_resonance",
        Model::Ps(p, _) if p.gamma_b == 0.0 && p.r == p.gamma_a => "spectrum.ps.near_resonance.pure",
        Model::Ps(p, _) if p.r > 0.0 => "spectrum.ps.near_resonance.lossy",
        Model::PsLoop(p) if p.xi == PsLoopParams::pure_xi(p.eta) => "spectrum.ps_loop.near_resonance.pure",
        Model::PsLoop(p) if p.xi > 0.0 => "spectrum.ps_loop.near_resonance",
        _ => return None,
    };
    Some(tag.into())
}

/// `(S_qq, S_pp)` from the near-resonance forms; `NaN` where no form exists.
fn near_spectra(model: &Model, w: f64) -> Result<(f64, f64), Failure> {
    let dw = nearest_offset(model, w)?;
    Ok(match model {
        Model::Pt(p, _) => {
            let s = pt_output_spectrum_near_resonance(p, dw)?;
            (s, s)
        }
        Model::Loop(p, _) => {
            let s = loop_spectrum_near_resonance(p, dw)?;
            (s, s)
        }
        Model::Ps(p, _) if p.gamma_b == 0.0 && p.r == p.gamma_a => (f64::NAN, ps_pure_near_resonance(p, dw)?),
        Model::Ps(p, _) => (f64::NAN, ps_lossy_near_resonance(p)?),
        Model::PsLoop(p) if p.xi == PsLoopParams::pure_xi(p.eta) => {
            (f64::NAN, ps_loop_pure_near_resonance(p.eta, p.tau, p.eps, p.n_th, dw))
        }
        Model::PsLoop(p) => (f64::NAN, ps_loop_near_resonance(p)?),
        _ => (f64::NAN, f64::NAN),
    })
}

pub fn spectrum(cfg: &RunConfig, opts: &Options) -> Result<Output, Failure> {
    spectrum_named(cfg, opts, "spectrum", "spectrum")
}

fn spectrum_named(cfg: &RunConfig, opts: &Options, name: &str, command: &'static str) -> Result<Output, Failure> {
    let mut cols = sweep_columns(cfg);
    cols.push(Column::new("omega", "rad/s"));
    cols.push(Column::new("formula_id", "-"));
    cols.push(Column::new("S_qq", "1"));
    cols.push(Column::new("S_pp", "1"));
    let mut table = Table::new(name, command, cfg.model, cols);
    let exact_id = format!("spectrum.{}.exact", cfg.model.name());
    let outs = for_points(cfg, |_, p| {
        let model = Model::build(cfg.model, p)?;
        let near_id = near_formula_id(&model);
        if !opts.formula.exact() && near_id.is_none() {
            return Err(Failure::validation(format!(
                "model `{}` with these parameters has no near-resonance form",
                cfg.model.name()
            )));
        }
        let (grid, excluded) = point_grid(cfg, &model, opts)?;
        let mut out = PointOut {
            excluded,
            ..Default::default()
        };
        let prefix = sweep_cells(cfg, p);
        let exact = if opts.formula.exact() {
            Some(exact_spectra(&model, &grid)?)
        } else {
            None
        };
        for (k, &w) in grid.points().iter().enumerate() {
            if let Some((q, pp)) = &exact {
                let mut row = prefix.clone();
                row.extend([
                    w.into(),
                    exact_id.as_str().into(),
                    q.values[k].into(),
                    pp.values[k].into(),
                ]);
                out.rows.push(row);
            }
            if let (true, Some(id)) = (opts.formula.near(), &near_id) {
                let (q, pp) = near_spectra(&model, w)?;
                let mut row = prefix.clone();
                row.extend([w.into(), id.as_str().into(), q.into(), pp.into()]);
                out.rows.push(row);
            }
        }
        if let Some(id) = near_id.filter(|_| opts.formula.near()) {
            out.sidecar.push(json!({ "near_formula_id": id }));
        }
        Ok(out)
    })?;
    let excluded = outs.iter().map(|o| o.excluded).sum();
    let mut ids: Vec<String> = Vec::new();
    if opts.formula.exact() {
        ids.push(exact_id);
    }
    for o in &outs {
        for v in &o.sidecar {
            if let Some(id) = v["near_formula_id"].as_str() {
                if !ids.iter().any(|x| x == id) {
                    ids.push(id.to_string());
                }
            }
        }
    }
    let outs = outs
        .into_iter()
        .map(|o| PointOut {
            sidecar: Vec::new(),
            ..o
        })
        .collect();
    table.formula_ids = ids;
    let (table, _) = assemble(table, outs);
    let record = summary_record(&table, cfg, excluded);
    Ok((table, vec![record]))
}

// ---------------------------------------------------------------- frequency noise

pub fn freqnoise(cfg: &RunConfig, opts: &Options) -> Result<Output, Failure> {
    freqnoise_named(cfg, opts, "freqnoise", "freqnoise")
}

fn freqnoise_named(cfg: &RunConfig, opts: &Options, name: &str, command: &'static str) -> Result<Output, Failure> {
    if !matches!(cfg.model, ModelId::Pt | ModelId::Loop) {
        return Err(Failure::validation("freqnoise supports the `pt` and `loop` models"));
    }
    let mut cols = sweep_columns(cfg);
    cols.push(Column::new("omega", "rad/s"));
    cols.push(Column::new("offset_rad_s", "rad/s"));
    cols.push(Column::new("formula_id", "-"));
    cols.push(Column::new("S_phidot", "rad^2/s"));
    let m = cfg.model.name();
    let exact_id = format!("freqnoise.{m}.exact_spectrum_chain");
    let near_id = format!("freqnoise.{m}.closed_form");
    let mut table = Table::new(name, command, cfg.model, cols);
    if opts.formula.exact() {
        table.formula_ids.push(exact_id.clone());
    }
    if opts.formula.near() {
        table.formula_ids.push(near_id.clone());
    }
    let outs = for_points(cfg, |_, p| {
        let model = Model::build(cfg.model, p)?;
        let (grid, excluded) = point_grid(cfg, &model, opts)?;
        let amp = carrier_plus(p).norm();
        let res_plus = model.resonances()?.expect("pt and loop have real resonances")[1];
        let mut out = PointOut {
            excluded,
            ..Default::default()
        };
        let prefix = sweep_cells(cfg, p);
        let (exact, gamma, closed) = match &model {
            Model::Pt(q, _) => (
                pt_output_spectrum_exact(q, &grid, Quadrature::P)?,
                q.gamma,
                pt_frequency_noise(q, amp),
            ),
            Model::Loop(q, _) => (
                loop_output_spectrum(q, &grid)?,
                q.gamma(),
                freq_noise_nonmarkovian(q, amp),
            ),
            _ => unreachable!("checked above"),
        };
        let closed = if opts.formula.near() { Some(closed?) } else { None };
        for (k, &w) in grid.points().iter().enumerate() {
            let offset = w - res_plus;
            if opts.formula.exact() {
                let s = frequency_noise_spectrum(exact.values[k], offset, gamma, amp)?;
                let mut row = prefix.clone();
                row.extend([w.into(), offset.into(), exact_id.as_str().into(), s.into()]);
                out.rows.push(row);
            }
            if let Some(c) = closed {
                let mut row = prefix.clone();
                row.extend([w.into(), offset.into(), near_id.as_str().into(), c.into()]);
                out.rows.push(row);
            }
        }
        Ok(out)
    })?;
    let excluded = outs.iter().map(|o| o.excluded).sum();
    let (table, _) = assemble(table, outs);
    let record = summary_record(&table, cfg, excluded);
    Ok((table, vec![record]))
}

// ---------------------------------------------------------------- imprecision

pub const PS_IMPRECISION: &str = "imprecision.phase_sensitive.balanced";

fn report_row(prefix: &Row, r: &ImprecisionReport) -> Row {
    let mut row = prefix.clone();
    row.extend([
        r.noise_formula.into(),
        r.sensitivity_formula.into(),
        r.sensitivity.into(),
        r.noise.into(),
        r.imprecision.into(),
        r.closed_form.into(),
        r.delta_omega_meas.into(),
    ]);
    row
}

pub fn imprecision_cmd(cfg: &RunConfig, opts: &Options) -> Result<Output, Failure> {
    imprecision_named(cfg, opts, "imprecision", "imprecision")
}

fn imprecision_named(cfg: &RunConfig, opts: &Options, name: &str, command: &'static str) -> Result<Output, Failure> {
    if !matches!(cfg.model, ModelId::Pt | ModelId::Ps) {
        return Err(Failure::validation("imprecision supports the `pt` and `ps` models"));
    }
    let mut cols = sweep_columns(cfg);
    cols.push(Column::new("formula_id", "-"));
    cols.push(Column::new("sensitivity_formula", "-"));
    cols.push(Column::new("sensitivity_rad_s", "rad/s"));
    cols.push(Column::new("noise_rad_s", "rad/s"));
    cols.push(Column::new("imprecision", "1"));
    cols.push(Column::new("closed_form", "1"));
    cols.push(Column::new("delta_omega_meas_rad_s", "rad/s"));
    let mut table = Table::new(name, command, cfg.model, cols);
    table.formula_ids = match cfg.model {
        ModelId::Pt => {
            let mut ids = Vec::new();
            if opts.formula.exact() {
                ids.push(epsense_core::estimation::NOISE_EXACT.to_string());
            }
            if opts.formula.near() {
                ids.push(epsense_core::estimation::NOISE_NEAR_RESONANCE.to_string());
            }
            ids.push(epsense_core::estimation::IMPRECISION_CLOSED_FORM.to_string());
            ids
        }
        _ => vec![PS_IMPRECISION.to_string()],
    };
    let outs = for_points(cfg, |_, p| {
        let model = Model::build(cfg.model, p)?;
        let dw_meas = require(p, "delta_omega_meas_rad_s", cfg.model)?;
        let prefix = sweep_cells(cfg, p);
        let mut out = PointOut::default();
        match &model {
            Model::Pt(q, m) => {
                if opts.formula.exact() {
                    let offset = p.get("offset_rad_s").unwrap_or(1e-3 * q.half_splitting());
                    out.rows
                        .push(report_row(&prefix, &imprecision_exact(q, m, dw_meas, offset)?));
                }
                if opts.formula.near() {
                    out.rows.push(report_row(&prefix, &imprecision(q, m, dw_meas)?));
                    out.rows
                        .push(report_row(&prefix, &imprecision_leading_order(q, m, dw_meas)?));
                }
            }
            Model::Ps(q, m) => {
                let imp = ps_imprecision(q, m, dw_meas, dw_meas)?;
                let s = sensitivity(q.gamma_a, q.eps_bar)?;
                let mut row = prefix.clone();
                row.extend([
                    PS_IMPRECISION.into(),
                    epsense_core::estimation::SENSITIVITY_EXACT.into(),
                    s.into(),
                    (imp * s).into(),
                    imp.into(),
                    f64::NAN.into(),
                    dw_meas.into(),
                ]);
                out.rows.push(row);
            }
            _ => unreachable!("checked above"),
        }
        Ok(out)
    })?;
    let (table, _) = assemble(table, outs);
    let record = summary_record(&table, cfg, 0);
    Ok((table, vec![record]))
}

// ---------------------------------------------------------------- sweep

pub fn sweep(cfg: &RunConfig, opts: &Options) -> Result<Output, Failure> {
    let mut out = match cfg.sweep_target {
        SweepTarget::Eigen => eigen(cfg)?,
        SweepTarget::Tf => tf(cfg, opts)?,
        SweepTarget::Spectrum => spectrum_named(cfg, opts, "sweep", "sweep")?,
        SweepTarget::Freqnoise => freqnoise_named(cfg, opts, "sweep", "sweep")?,
        SweepTarget::Imprecision => imprecision_named(cfg, opts, "sweep", "sweep")?,
    };
    out.0.name = "sweep".into();
    out.0.command = "sweep";
    Ok(out)
}

// ---------------------------------------------------------------- simulation

fn sim_config(sim_spec: &SimSpec, seed: u64) -> SimConfig {
    let mut c = SimConfig::new(sim_spec.dt_s, sim_spec.duration_s, seed);
    c.segments = sim_spec.segments;
    c.window = match sim_spec.window {
        WindowId::Hann => Window::Hann,
        WindowId::Rectangular => Window::Rectangular,
    };
    c.gamma_reg = sim_spec.gamma_reg_rad_s;
    c.burn_in = sim_spec.burn_in_s;
    c.decimation = sim_spec.decimation;
    c
}

fn quadrature(id: QuadratureId) -> Quadrature {
    match id {
        QuadratureId::Q => Quadrature::Q,
        QuadratureId::P => Quadrature::P,
    }
}

/// Analytic noise spectrum of the simulated model, damped by `gamma_reg` like the simulation.
fn analytic_psd(model: &Model, w: f64, reg: f64, x: Quadrature) -> Result<f64, Failure> {
    let z = Complex64::new(w - model.omega0(), reg);
    Ok(match model {
        Model::Passive(p) => {
            let (a, b) = passive_gains(p.gamma_a, p.gamma_b, p.eps, z);
            a.norm_sqr() * (0.5 + p.n_a) + b.norm_sqr() * (0.5 + p.n_b)
        }
        Model::Pt(p, _) => pt_spectrum_at(p.gamma, p.eps_bar, p.n_in, p.n_amp, z),
        Model::Loop(p, _) => loop_spectrum_at(p.eta, p.eps, p.n_th, z * p.tau),
        Model::PsLoop(p) => {
            let (a, b) = ps_loop_gains(p.eta, p.eps, p.xi, p.calibrated_gain()?, z * p.tau, x);
            (a.norm_sqr() + b.norm_sqr()) * (0.5 + p.n_th)
        }
        _ => f64::NAN,
    })
}

fn run_simulation(model: &Model, cfg: &SimConfig) -> Result<TimeSeries, Failure> {
    Ok(match model {
        Model::Passive(p) => simulate_passive(p, cfg)?,
        Model::Pt(p, m) => simulate_pt_markovian(p, m, cfg, None)?,
        Model::Loop(p, _) => simulate_loop(p, cfg)?,
        Model::PsLoop(p) => simulate_ps_loop(p, cfg)?,
        _ => {
            return Err(Failure::validation(
                "simulate supports the `passive`, `pt`, `loop` and `ps_loop` models",
            ))
        }
    })
}

fn moments(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

pub fn simulate(cfg: &RunConfig) -> Result<Vec<Output>, Failure> {
    let sim_spec = cfg
        .sim
        .as_ref()
        .ok_or_else(|| Failure::validation("simulate needs a [sim] table"))?;
    let x = quadrature(sim_spec.quadrature);
    let mut psd_cols = sweep_columns(cfg);
    psd_cols.push(Column::new("omega", "rad/s"));
    psd_cols.push(Column::new("S_sim", "1"));
    psd_cols.push(Column::new("S_analytic", "1"));
    let mut psd_table = Table::new("simulate_psd", "simulate", cfg.model, psd_cols);
    psd_table.formula_ids = vec![
        format!("simulate.{}.welch", cfg.model.name()),
        format!("spectrum.{}.exact_regularized", cfg.model.name()),
    ];
    psd_table.notes.push(format!("quadrature: {}", x.label()));
    let mut sum_cols = sweep_columns(cfg);
    sum_cols.push(Column::new("quantity", "-"));
    sum_cols.push(Column::new("value", "per quantity"));
    let mut sum_table = Table::new("simulate_summary", "simulate", cfg.model, sum_cols);
    sum_table.formula_ids = psd_table.formula_ids.clone();

    let outs = for_points(cfg, |i, p| {
        let model = Model::build(cfg.model, p)?;
        let seed = mix_seed(cfg.seed, i as u64);
        let sc = sim_config(sim_spec, seed);
        let series = run_simulation(&model, &sc)?;
        let psd = welch_psd(&series, x, &sc)?;
        let prefix = sweep_cells(cfg, p);
        let mut out = PointOut::default();
        for (w, s) in psd.grid.iter().zip(&psd.values) {
            let mut row = prefix.clone();
            row.extend([
                (*w).into(),
                (*s).into(),
                analytic_psd(&model, *w, sc.gamma_reg, x)?.into(),
            ]);
            out.rows.push(row);
        }
        let (mq, vq) = moments(&series.quadrature(Quadrature::Q));
        let (mp, vp) = moments(&series.quadrature(Quadrature::P));
        for (k, v) in [
            ("samples", series.len() as f64),
            ("dt_out_s", series.dt),
            ("mean_q", mq),
            ("var_q", vq),
            ("mean_p", mp),
            ("var_p", vp),
        ] {
            let mut row = prefix.clone();
            row.extend([k.into(), v.into()]);
            out.extra.push(row);
        }
        let mut refs = Vec::new();
        // offsets are taken from the upper resonance, or from omega0 when there is none
        let center = model.resonances()?.map_or(model.omega0(), |r| r[1]);
        {
            for &off in &sim_spec.offsets_rad_s {
                let w = center + off;
                let k = psd.grid.partition_point(|&g| g < w).min(psd.len() - 1);
                let k = if k > 0 && (psd.grid[k - 1] - w).abs() < (psd.grid[k] - w).abs() {
                    k - 1
                } else {
                    k
                };
                refs.push(json!({
                    "offset_rad_s": off,
                    "omega_rad_s": w,
                    "analytic": analytic_psd(&model, w, sc.gamma_reg, x)?,
                    "nearest_bin_rad_s": psd.grid[k],
                    "simulated": psd.values[k],
                }));
            }
        }
        out.sidecar.push(json!({
            "point": i,
            "seed": seed,
            "segments": sc.segments,
            "window": sc.window.name(),
            "dt_s": sc.dt,
            "duration_s": sc.duration,
            "decimation": sc.decimation,
            "gamma_reg_rad_s": sc.gamma_reg,
            "burn_in_s": sc.burn_in,
            "samples": series.len(),
            "quadrature": x.label(),
            "references": refs,
        }));
        Ok(out)
    })?;
    let mut extra = Vec::new();
    let outs: Vec<PointOut> = outs
        .into_iter()
        .map(|mut o| {
            extra.append(&mut o.extra);
            o
        })
        .collect();
    sum_table.rows = extra;
    let (psd_table, mut sidecar) = assemble(psd_table, outs);
    sidecar.insert(0, summary_record(&psd_table, cfg, 0));
    let sum_record = summary_record(&sum_table, cfg, 0);
    Ok(vec![(psd_table, sidecar), (sum_table, vec![sum_record])])
}

// ---------------------------------------------------------------- validate

/// Criteria whose checks are statistical; failing only these maps to the statistics exit code.
const STATISTICAL: [u8; 2] = [4, 7];

pub fn validate(criteria: &[u8]) -> Result<(String, u8), Failure> {
    let reports: Vec<_> = criteria
        .iter()
        .map(|&id| epsense_core::validation::run_criterion(id))
        .collect::<Result<_, _>>()?;
    let mut text = String::new();
    text.push_str("criterion  result  seconds  title\n");
    for r in &reports {
        text.push_str(&format!(
            "{:>9}  {:<6}  {:>7.2}  {}\n",
            r.id,
            if r.passed() { "PASS" } else { "FAIL" },
            r.seconds,
            r.title
        ));
        for c in &r.checks {
            text.push_str(&format!(
                "           {} {}: {} ({})\n",
                if c.passed { "ok  " } else { "FAIL" },
                c.label,
                crate::output::format_float(c.value),
                c.bound
            ));
        }
    }
    let failed: Vec<u8> = reports.iter().filter(|r| !r.passed()).map(|r| r.id).collect();
    let code = if failed.is_empty() {
        crate::exit::OK
    } else if failed.iter().all(|id| STATISTICAL.contains(id)) {
        crate::exit::RESOLUTION
    } else {
        crate::exit::INTERNAL
    };
    Ok((text, code))
}
