//! `epsense` command-line front end: configuration, dispatch and CSV output.

pub mod commands;
pub mod config;
pub mod exit;
pub mod model;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::{Formula, Options, Output};
use config::RunConfig;
use exit::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "epsense",
    version,
    about = "Noise, sensitivity and imprecision of exceptional-point sensors"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// TOML run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `out_dir` in the config).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Base seed (overrides `seed` in the config).
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Formula::Both)]
    pub formula: Formula,
    /// Fail (exit 3) instead of dropping grid points next to a resonance.
    #[arg(long, global = true)]
    pub no_pole_guard: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normal-mode frequencies and splitting.
    Eigen,
    /// Transfer functions on the configured grid.
    Tf,
    /// Output quadrature noise spectra.
    Spectrum,
    /// Frequency-noise spectrum of the carrier phase.
    Freqnoise,
    /// Stochastic simulation with Welch PSD estimate.
    Simulate,
    /// Sensitivity, noise and imprecision of the splitting estimate.
    Imprecision,
    /// Run `sweep_target` over the configured sweep axes.
    Sweep,
    /// Run the acceptance criteria and print a table.
    Validate {
        /// Comma-separated criterion ids (default: all).
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u8>>,
    },
}

fn load(global: &Global) -> Result<RunConfig, Failure> {
    let path = global
        .config
        .as_ref()
        .ok_or_else(|| Failure::validation("--config PATH is required for this command"))?;
    let mut cfg = RunConfig::load(path)?;
    if let Some(seed) = global.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &global.out {
        cfg.out_dir = out.clone();
    }
    Ok(cfg)
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    if let Command::Validate { criteria } = &cli.command {
        let ids = criteria
            .clone()
            .unwrap_or_else(|| epsense_core::validation::CRITERIA.to_vec());
        let (text, code) = commands::validate(&ids)?;
        print!("{text}");
        return Ok(code);
    }
    let cfg = load(&cli.global)?;
    let opts = Options {
        formula: cli.global.formula,
        pole_guard: !cli.global.no_pole_guard,
    };
    let outputs: Vec<Output> = match cli.command {
        Command::Eigen => vec![commands::eigen(&cfg)?],
        Command::Tf => vec![commands::tf(&cfg, &opts)?],
        Command::Spectrum => vec![commands::spectrum(&cfg, &opts)?],
        Command::Freqnoise => vec![commands::freqnoise(&cfg, &opts)?],
        Command::Simulate => commands::simulate(&cfg)?,
        Command::Imprecision => vec![commands::imprecision_cmd(&cfg, &opts)?],
        Command::Sweep => vec![commands::sweep(&cfg, &opts)?],
        Command::Validate { .. } => unreachable!("handled above"),
    };
    for (table, sidecar) in &outputs {
        let path = output::write(&cfg.out_dir, table, sidecar, &cfg)?;
        eprintln!("wrote {} ({} rows)", path.display(), table.rows.len());
    }
    Ok(exit::OK)
}

/// Runs the CLI on the configured worker pool and returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return exit::VALIDATION;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return exit::INTERNAL;
        }
    };
    match pool.install(|| dispatch(cli)) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {f}");
            f.code
        }
    }
}
