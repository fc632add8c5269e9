use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

use epsense_cli::config::RunConfig;
use epsense_core::markovian::pt_eigenfrequencies;
use epsense_core::PtParams;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_epsense");

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("run.toml");
    std::fs::write(&path, config).unwrap();
    Command::new(BIN)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

struct Csv {
    header: Vec<String>,
    meta: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(path: &Path) -> Csv {
        let text = std::fs::read_to_string(path).unwrap();
        assert!(!text.contains('\r'));
        let mut meta = Vec::new();
        let mut lines = text.lines();
        let header = loop {
            let l = lines.next().unwrap();
            match l.strip_prefix("# ") {
                Some(m) => meta.push(m.to_string()),
                None => break l.split(',').map(String::from).collect(),
            }
        };
        let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
        Csv { header, meta, rows }
    }

    fn col(&self, name: &str) -> usize {
        self.header
            .iter()
            .position(|h| h == name)
            .unwrap_or_else(|| panic!("no column {name}"))
    }

    fn num(&self, row: &[String], name: &str) -> f64 {
        row[self.col(name)].parse().unwrap()
    }

    fn meta(&self, key: &str) -> &str {
        self.meta
            .iter()
            .find_map(|m| m.strip_prefix(&format!("{key}: ")))
            .unwrap_or_else(|| panic!("no header {key}"))
    }
}

const PT_SPECTRUM: &str = r#"
model = "pt"
seed = 3

[params]
gamma_rad_s = 1.0
eps = 1e-3

[grid]
min_rad_s = -1e-5
max_rad_s = 1e-5
points = 21
reference = "resonance_plus"
"#;

#[test]
fn eigen_sweep_matches_library_bitwise() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
model = "pt"
[params]
gamma_rad_s = 1.0
eps = 1e-3
[[sweep]]
param = "eps"
min = 1e-6
max = 1e-2
points = 50
scale = "log"
"#;
    let o = run(dir.path(), cfg, &["eigen"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = Csv::read(&dir.path().join("out/eigen.csv"));
    assert_eq!(csv.rows.len(), 50);
    let mut last = 0.0;
    for row in &csv.rows {
        let eps = csv.num(row, "eps");
        let split = csv.num(row, "splitting_rad_s");
        assert!(split > last);
        last = split;
        let p = PtParams::new(0.0, 1.0, eps, 0.0, 0.0).unwrap();
        let e = pt_eigenfrequencies(&p).unwrap();
        assert_eq!(csv.num(row, "re_omega_plus").to_bits(), e.omega_plus.re.to_bits());
        assert_eq!(csv.num(row, "re_omega_minus").to_bits(), e.omega_minus.re.to_bits());
        assert_eq!(split.to_bits(), e.splitting().re.to_bits());
    }
}

#[test]
fn eigen_at_the_exceptional_point_has_zero_splitting() {
    let dir = TempDir::new().unwrap();
    let o = run(
        dir.path(),
        "model = \"pt\"\n[params]\ngamma_rad_s = 2.0\neps = 0.0\n",
        &["eigen"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = Csv::read(&dir.path().join("out/eigen.csv"));
    assert_eq!(csv.num(&csv.rows[0], "splitting_rad_s"), 0.0);
}

#[test]
fn two_axis_sweep_emits_every_point() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
model = "pt"
sweep_target = "eigen"
[params]
gamma_rad_s = 1.0
eps = 1e-3
[[sweep]]
param = "eps"
min = 1e-6
max = 1e-2
points = 100
scale = "log"
[[sweep]]
param = "gamma_rad_s"
min = 0.5
max = 2.0
points = 100
"#;
    let o = run(dir.path(), cfg, &["sweep"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = Csv::read(&dir.path().join("out/sweep.csv"));
    assert_eq!(csv.rows.len(), 10_000);
    // first axis outermost
    assert_eq!(csv.num(&csv.rows[0], "eps"), 1e-6);
    assert_eq!(csv.num(&csv.rows[99], "eps"), 1e-6);
    assert_eq!(csv.num(&csv.rows[100], "gamma_rad_s"), 0.5);
    assert_eq!(csv.num(&csv.rows[9999], "eps"), 1e-2);
}

#[test]
fn output_bytes_do_not_depend_on_workers() {
    let cfg = r#"
model = "pt"
sweep_target = "spectrum"
[params]
gamma_rad_s = 1.0
eps = 1e-3
[grid]
min_rad_s = -0.3
max_rad_s = 0.3
points = 40
[[sweep]]
param = "eps"
min = 1e-4
max = 1e-2
points = 30
scale = "log"
"#;
    let read = |workers: &str| {
        let dir = TempDir::new().unwrap();
        let o = run(dir.path(), cfg, &["sweep", "--workers", workers]);
        assert_eq!(code(&o), 0);
        (
            std::fs::read(dir.path().join("out/sweep.csv")).unwrap(),
            std::fs::read(dir.path().join("out/sweep.jsonl")).unwrap(),
        )
    };
    let one = read("1");
    assert_eq!(one, read("4"));
    assert_eq!(one, read("7"));
}

#[test]
fn near_resonance_and_exact_spectra_agree() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), PT_SPECTRUM, &["spectrum"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = Csv::read(&dir.path().join("out/spectrum.csv"));
    assert_eq!(csv.meta("formula_ids"), "spectrum.pt.exact spectrum.pt.near_resonance");
    assert!(csv.meta("note").contains("1 grid points excluded"));
    let mut by_omega: HashMap<String, Vec<f64>> = HashMap::new();
    for row in &csv.rows {
        by_omega
            .entry(row[csv.col("omega")].clone())
            .or_default()
            .push(csv.num(row, "S_pp"));
    }
    assert_eq!(by_omega.len(), 20);
    for (w, v) in by_omega {
        assert_eq!(v.len(), 2);
        assert!((v[1] / v[0] - 1.0).abs() <= 0.02, "omega {w}: {v:?}");
    }
}

#[test]
fn spectrum_output_is_deterministic() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    run(a.path(), PT_SPECTRUM, &["spectrum"]);
    run(b.path(), PT_SPECTRUM, &["spectrum"]);
    let read = |d: &TempDir| std::fs::read(d.path().join("out/spectrum.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn header_carries_the_config_hash() {
    let dir = TempDir::new().unwrap();
    run(dir.path(), PT_SPECTRUM, &["spectrum", "--formula", "exact"]);
    let csv = Csv::read(&dir.path().join("out/spectrum.csv"));
    let mut cfg = RunConfig::parse(PT_SPECTRUM).unwrap();
    cfg.out_dir = dir.path().join("out");
    assert_eq!(csv.meta("config_sha256"), cfg.sha256());
    assert!(csv.meta("tool").starts_with("epsense "));
    assert_eq!(csv.meta("formula_ids"), "spectrum.pt.exact");
    assert_eq!(csv.rows.len(), 20);
    let round = RunConfig::parse(&cfg.to_toml()).unwrap();
    assert_eq!(round, cfg);
}

#[test]
fn disabled_pole_guard_fails_on_a_resonance() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), PT_SPECTRUM, &["spectrum", "--no-pole-guard"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("pole guard"));
}

#[test]
fn invalid_configs_exit_with_validation_code() {
    let dir = TempDir::new().unwrap();
    let unknown = "model = \"pt\"\n[params]\ngamma_rad_s = 1.0\neps = 1e-3\nbogus = 2.0\n";
    assert_eq!(code(&run(dir.path(), unknown, &["eigen"])), 2);
    let negative = "model = \"pt\"\n[params]\ngamma_rad_s = -1.0\neps = 1e-3\n";
    assert_eq!(code(&run(dir.path(), negative, &["eigen"])), 2);
    let missing = "model = \"pt\"\n[params]\neps = 1e-3\n";
    let o = run(dir.path(), missing, &["eigen"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma_rad_s"));
    let axes: String = (0..3)
        .map(|_| "[[sweep]]\nparam = \"eps\"\nmin = 0.1\nmax = 0.2\npoints = 2\n")
        .collect();
    let three = format!("model = \"pt\"\n[params]\ngamma_rad_s = 1.0\neps = 1e-3\n{axes}");
    assert_eq!(code(&run(dir.path(), &three, &["eigen"])), 2);
    let no_config = Command::new(BIN).arg("eigen").output().unwrap();
    assert_eq!(code(&no_config), 2);
}

#[test]
fn imprecision_rows_match_closed_form() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"
model = "pt"
[params]
gamma_rad_s = 1.0
eps = 1e-5
carrier_plus_re = 1.0
carrier_minus_im = 1.0
delta_omega_meas_rad_s = 1e-3
"#;
    let o = run(dir.path(), cfg, &["imprecision"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = Csv::read(&dir.path().join("out/imprecision.csv"));
    assert_eq!(csv.rows.len(), 3);
    let closed = (1e-3 / (16.0 * std::f64::consts::PI)).sqrt();
    for row in &csv.rows {
        assert!((csv.num(row, "closed_form") / closed - 1.0).abs() < 1e-12);
        assert!((csv.num(row, "imprecision") / closed - 1.0).abs() < 1e-4);
    }
}

const PASSIVE_SIM: &str = r#"
model = "passive"
seed = 21

[params]
gamma_a_rad_s = 1.0
gamma_b_rad_s = 0.5
eps = 0.5
n_b = 1.0

[sim]
dt_s = 0.05
duration_s = 104883.2
segments = 2048
quadrature = "p"
offsets_rad_s = [0.0, 1.0]
"#;

#[test]
fn passive_simulation_tracks_its_analytic_column() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), PASSIVE_SIM, &["simulate"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = Csv::read(&dir.path().join("out/simulate_psd.csv"));
    let mut worst: f64 = 0.0;
    for row in &csv.rows {
        if csv.num(row, "omega").abs() <= 5.0 {
            worst = worst.max((csv.num(row, "S_sim") / csv.num(row, "S_analytic") - 1.0).abs());
        }
    }
    assert!(worst < 0.10, "worst bin error {worst}");
    let meta = std::fs::read_to_string(dir.path().join("out/simulate_psd.jsonl")).unwrap();
    let record: serde_json::Value = serde_json::from_str(meta.lines().nth(1).unwrap()).unwrap();
    assert_eq!(record["segments"], 2048);
    assert_eq!(record["references"].as_array().unwrap().len(), 2);
    assert!(record["seed"].as_u64().is_some());
    let summary = Csv::read(&dir.path().join("out/simulate_summary.csv"));
    assert_eq!(summary.rows[0][0], "samples");
}

#[test]
fn simulation_is_reproducible_and_worker_invariant() {
    let small = PASSIVE_SIM
        .replace("duration_s = 104883.2", "duration_s = 3276.8")
        .replace("segments = 2048", "segments = 16");
    let read = |seed: &str, workers: &str| {
        let dir = TempDir::new().unwrap();
        let o = run(dir.path(), &small, &["simulate", "--seed", seed, "--workers", workers]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(dir.path().join("out/simulate_psd.csv")).unwrap()
    };
    let a = read("5", "1");
    assert_eq!(a, read("5", "3"));
    assert_ne!(a, read("6", "1"));
}

#[test]
fn too_few_segments_is_a_resolution_error() {
    let dir = TempDir::new().unwrap();
    let cfg = PASSIVE_SIM.replace("segments = 2048", "segments = 2");
    let o = run(dir.path(), &cfg, &["simulate"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("segment"));
}

#[test]
fn validate_reports_a_passing_subset() {
    let o = Command::new(BIN)
        .args(["validate", "--criteria", "1,2,3"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let out = String::from_utf8_lossy(&o.stdout);
    assert_eq!(out.matches("PASS").count(), 3);
    let bad = Command::new(BIN)
        .args(["validate", "--criteria", "12"])
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}
