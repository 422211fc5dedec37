//! Experiment reports and their JSON/CSV serialization.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

/// A finite-scale claim and whether it held.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub claim: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub wall_seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_rss_kib: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: ExperimentKind,
    /// The asymptotic statement the experiment probes. Only cited, never claimed.
    pub motivation: String,
    pub inputs: ExperimentConfig,
    pub headline: BTreeMap<String, f64>,
    pub verdicts: Vec<Verdict>,
    pub scope: Vec<String>,
    pub flags: Vec<String>,
    pub tables: Vec<Table>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<RunStats>,
}

impl ExperimentReport {
    pub fn new(kind: ExperimentKind, motivation: &str, inputs: &ExperimentConfig) -> Self {
        let mut inputs = inputs.clone();
        inputs.experiment = Some(kind);
        ExperimentReport {
            experiment: kind,
            motivation: motivation.to_string(),
            inputs,
            headline: BTreeMap::new(),
            verdicts: Vec::new(),
            scope: Vec::new(),
            flags: Vec::new(),
            tables: Vec::new(),
            stats: None,
        }
    }

    pub fn headline(&mut self, key: &str, value: f64) {
        self.headline.insert(key.to_string(), value);
    }

    pub fn verdict(&mut self, name: &str, claim: String, passed: bool, margin: Option<f64>) {
        self.verdicts.push(Verdict {
            name: name.to_string(),
            claim,
            passed,
            margin,
        });
    }

    pub fn scope(&mut self, text: String) {
        self.scope.push(text);
    }

    pub fn flag(&mut self, text: String) {
        self.flags.push(text);
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn get_verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Writes `report.json` into `dir`.
    pub fn write_json(&self, dir: &Path) -> Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("report.json");
        std::fs::write(&path, self.to_json()?)?;
        Ok(path)
    }

    /// Writes one `<table>.csv` per table into `dir`.
    pub fn write_csv(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(&t.columns)?;
            for row in &t.rows {
                w.write_record(row.iter().map(cell_text))?;
            }
            w.flush()?;
            out.push(path);
        }
        Ok(out)
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// JSON cell for a count; values past `u64` become strings.
pub fn count(c: u128) -> Value {
    match u64::try_from(c) {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(c.to_string()),
    }
}

/// JSON cell for an optional float; non-finite values become null.
pub fn real(x: Option<f64>) -> Value {
    match x {
        Some(v) if v.is_finite() => Value::from(v),
        _ => Value::Null,
    }
}

pub fn text(s: impl ToString) -> Value {
    Value::from(s.to_string())
}
