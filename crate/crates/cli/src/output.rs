use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::CliError;

/// Provenance of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepMeta {
    pub figure: String,
    pub version: String,
    pub git_rev: String,
    /// Every tolerance that entered the sweep, by name.
    pub tolerances: Map<String, Value>,
    pub parameters: Map<String, Value>,
    pub solves: usize,
    pub infeasible: usize,
    pub seed: u64,
}

/// Table of numeric rows with named columns.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub schema: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub meta: SweepMeta,
}

impl SweepResult {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|c| c == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.schema)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format_cell(*v)))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }
}

fn format_cell(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v}")
    }
}

pub enum Artifact {
    Record(Map<String, Value>),
    Sweep(SweepResult),
}

impl Artifact {
    pub fn record(value: impl Serialize) -> Result<Self, CliError> {
        match serde_json::to_value(value)? {
            Value::Object(m) => Ok(Artifact::Record(m)),
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                Ok(Artifact::Record(m))
            }
        }
    }

    fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match (self, format) {
            (Artifact::Record(m), Format::Json) => json_bytes(m),
            (Artifact::Record(m), Format::Csv) => record_csv(m),
            (Artifact::Sweep(s), Format::Json) => json_bytes(s),
            (Artifact::Sweep(s), Format::Csv) => s.to_csv(),
        }
    }

    pub fn default_format(&self) -> Format {
        match self {
            Artifact::Record(_) => Format::Json,
            Artifact::Sweep(_) => Format::Csv,
        }
    }

    /// Writes to `out` or stdout. A csv sweep written to a file gets a `.meta.json` sidecar.
    pub fn emit(&self, format: Option<Format>, out: Option<&Path>) -> Result<(), CliError> {
        let format = format.unwrap_or_else(|| self.default_format());
        let bytes = self.render(format)?;
        match out {
            Some(path) => {
                fs::write(path, &bytes)?;
                if let (Artifact::Sweep(s), Format::Csv) = (self, format) {
                    fs::write(meta_path(path), json_bytes(&s.meta)?)?;
                }
            }
            None => std::io::stdout().lock().write_all(&bytes)?,
        }
        Ok(())
    }
}

pub fn meta_path(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

fn json_bytes(v: &impl Serialize) -> Result<Vec<u8>, CliError> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// One header row and one value row; nested values are written as JSON text.
fn record_csv(m: &Map<String, Value>) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(m.keys())?;
    w.write_record(m.values().map(|v| match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }))?;
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}
