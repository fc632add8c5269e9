//! CSV tables with a `#` header block, plus a JSON-lines sidecar.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::config::{ModelId, RunConfig};

pub const TOOL: &str = concat!("epsense ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest representation that parses back to the same `f64`; scientific notation outside
/// `[1e-4, 1e16)`.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = v.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Unit of a column inferred from its suffix.
pub fn unit_of(name: &str) -> &'static str {
    if name.ends_with("_rad_s")
        || name.starts_with("omega")
        || name.starts_with("re_omega")
        || name.starts_with("im_omega")
    {
        "rad/s"
    } else if name.ends_with("_s") {
        "s"
    } else if name.ends_with("_rad") {
        "rad"
    } else {
        "1"
    }
}

#[derive(Debug, Clone)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: &str, unit: &str) -> Self {
        Self {
            name: name.into(),
            unit: unit.into(),
        }
    }

    pub fn inferred(name: &str) -> Self {
        Self::new(name, unit_of(name))
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub command: &'static str,
    pub model: ModelId,
    pub formula_ids: Vec<String>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(name: &str, command: &'static str, model: ModelId, columns: Vec<Column>) -> Self {
        Self {
            name: name.into(),
            command,
            model,
            formula_ids: Vec::new(),
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn render(&self, cfg: &RunConfig) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# tool: {TOOL}");
        let _ = writeln!(out, "# command: {}", self.command);
        let _ = writeln!(out, "# model: {}", self.model.name());
        let _ = writeln!(out, "# formula_ids: {}", self.formula_ids.join(" "));
        let units: Vec<String> = self.columns.iter().map(|c| format!("{}[{}]", c.name, c.unit)).collect();
        let _ = writeln!(out, "# units: {}", units.join(" "));
        let _ = writeln!(out, "# seed: {}", cfg.seed);
        let _ = writeln!(out, "# config_sha256: {}", cfg.sha256());
        for note in &self.notes {
            let _ = writeln!(out, "# note: {note}");
        }
        let header: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Writes `<name>.csv` and `<name>.jsonl` into `dir`; returns the CSV path.
pub fn write(dir: &Path, table: &Table, sidecar: &[Value], cfg: &RunConfig) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{}.csv", table.name));
    std::fs::write(&csv, table.render(cfg))?;
    let mut lines = String::new();
    for record in sidecar {
        lines.push_str(&record.to_string());
        lines.push('\n');
    }
    std::fs::write(dir.join(format!("{}.jsonl", table.name)), lines)?;
    Ok(csv)
}
