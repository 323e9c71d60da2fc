//! Artifact writing. Every file starts with the config hash and seed; numbers
//! carry 17 significant digits so reruns compare byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Number, Value};

use crate::config::{Experiment, Format};

/// One CSV file, named `<name>.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(name: impl Into<String>, header: &[&'static str]) -> Self {
        Self { name: name.into(), header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Everything one experiment produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: Experiment,
    pub config_hash: String,
    pub seed: Option<u64>,
    /// Canonical config, embedded in the JSON document.
    pub config: Value,
    pub summary: Vec<(String, String)>,
    pub tables: Vec<CsvTable>,
    /// Metadata files written next to the CSV tables.
    pub sidecars: Vec<(String, Value)>,
    pub results: Value,
}

impl Report {
    pub fn summary_value(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn table(&self, name: &str) -> Option<&CsvTable> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Aligned `key  value` lines.
    pub fn summary_text(&self) -> String {
        let width = self.summary.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        let mut out = format!("experiment {} (config {}", self.experiment.name(), &self.config_hash[..12]);
        if let Some(seed) = self.seed {
            out.push_str(&format!(", seed {seed}"));
        }
        out.push_str(")\n");
        for (k, v) in &self.summary {
            out.push_str(&format!("  {k:<width$}  {v}\n"));
        }
        out
    }

    fn seed_text(&self) -> String {
        self.seed.map_or_else(|| "none".to_string(), |s| s.to_string())
    }

    pub fn csv_text(&self, table: &CsvTable) -> String {
        let mut out = format!("# config_hash={},seed={}\n", self.config_hash, self.seed_text());
        out.push_str(&table.header.join(","));
        out.push('\n');
        for row in &table.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    fn provenance(&self) -> Value {
        json!({
            "experiment": self.experiment.name(),
            "config_hash": self.config_hash,
            "seed": self.seed,
        })
    }

    pub fn json_text(&self) -> String {
        let mut doc = self.provenance();
        doc["config"] = self.config.clone();
        doc["results"] = self.results.clone();
        pretty(&doc)
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

#[derive(Debug, thiserror::Error)]
#[error("cannot write {}: {source}", path.display())]
pub struct EmitError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

/// Writes the report into `dir` and returns the paths written, in order.
pub fn emit_report(report: &Report, dir: &Path, format: Format) -> Result<Vec<PathBuf>, EmitError> {
    fs::create_dir_all(dir).map_err(|source| EmitError { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    let mut write = |name: String, text: String| {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|source| EmitError { path: path.clone(), source })?;
        written.push(path);
        Ok(())
    };
    if format.csv() {
        for table in &report.tables {
            write(format!("{}.csv", table.name), report.csv_text(table))?;
        }
        for (name, meta) in &report.sidecars {
            let mut doc = report.provenance();
            doc["metadata"] = meta.clone();
            write(format!("{name}.json"), pretty(&doc))?;
        }
    }
    if format.json() {
        write(format!("{}.json", report.experiment.name()), report.json_text())?;
    }
    Ok(written)
}

/// 17 significant digits in scientific notation.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// JSON number with the same text as [`num`]; non-finite values become null.
pub fn jnum(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(num(x).parse::<Number>().expect("formatted float is a JSON number"))
    } else {
        Value::Null
    }
}

pub fn jvec(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| jnum(*x)).collect())
}

pub fn jmatrix(m: &nalgebra::DMatrix<f64>) -> Value {
    Value::Array(m.row_iter().map(|r| Value::Array(r.iter().map(|x| jnum(*x)).collect())).collect())
}
