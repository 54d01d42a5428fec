//! Tables, JSON documents and the metadata sidecar.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A table cell.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // 17 significant digits round-trip every f64.
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(serde_json::Value::Null, serde_json::Value::Number),
            Cell::Int(i) => (*i).into(),
            Cell::Text(s) => s.clone().into(),
            Cell::Empty => serde_json::Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Write(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Write(e.to_string()))
    }

    /// `{"schema_version", "kind", "context", "rows": [{column: value}]}`.
    pub fn to_json(&self, kind: &str, context: serde_json::Value) -> Result<Vec<u8>, CliError> {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                serde_json::Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect())
            })
            .collect();
        let doc = serde_json::json!({
            "schema_version": SCHEMA_VERSION,
            "kind": kind,
            "context": context,
            "rows": rows,
        });
        json_bytes(&doc)
    }

    pub fn render(&self, format: Format, kind: &str, context: serde_json::Value) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(kind, context),
        }
    }
}

pub fn json_bytes(value: &impl Serialize) -> Result<Vec<u8>, CliError> {
    let mut v = serde_json::to_vec_pretty(value).map_err(|e| CliError::Write(e.to_string()))?;
    v.push(b'\n');
    Ok(v)
}

/// Run metadata written next to a data file, never inside it.
#[derive(Debug, Serialize)]
pub struct Meta {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub command: Vec<String>,
    pub precision: philophase::Precision,
    pub started_unix_s: u64,
    pub elapsed_ms: u128,
    pub threads: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notes: Option<serde_json::Value>,
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    out.with_file_name(name)
}

/// Write to `out`, or to stdout when absent. Files get a sidecar.
pub fn emit(bytes: &[u8], out: Option<&Path>, meta: impl FnOnce() -> Meta) -> Result<(), CliError> {
    match out {
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes).and_then(|_| so.flush()).map_err(|e| CliError::Write(format!("stdout: {e}")))
        }
        Some(path) => {
            std::fs::write(path, bytes).map_err(|e| CliError::Write(format!("{}: {e}", path.display())))?;
            let side = sidecar_path(path);
            std::fs::write(&side, json_bytes(&meta())?)
                .map_err(|e| CliError::Write(format!("{}: {e}", side.display())))
        }
    }
}
