//! Report tables and their CSV/JSON serialization.

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Int(u64),
    Float(f64),
    Bool(bool),
    Text(String),
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Floats carry 17 significant digits so reports diff cleanly and round-trip.
pub fn float17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Empty => String::new(),
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => float17(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Empty => Value::Null,
            Cell::Int(v) => json!(v),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Bool(v) => json!(v),
            Cell::Text(s) => json!(s),
        }
    }
}

/// The machine-readable result of one command.
pub struct Report {
    pub command: &'static str,
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
    pub pass: bool,
    pub seed: Option<u64>,
    /// Extra structured output for the JSON format only (full bound reports).
    pub details: Option<Value>,
    /// Human-readable lines for the terminal.
    pub summary: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, columns: &'static [&'static str]) -> Self {
        Self {
            command,
            columns,
            rows: Vec::new(),
            pass: true,
            seed: None,
            details: None,
            summary: Vec::new(),
        }
    }

    pub fn say(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        Ok(w.into_inner()?)
    }

    /// `timestamp` is omitted in deterministic mode.
    pub fn to_json(&self, timestamp: Option<u64>) -> Result<Vec<u8>> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("tool".into(), json!("stein-audit"));
        doc.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        doc.insert("command".into(), json!(self.command));
        if let Some(t) = timestamp {
            doc.insert("generated_unix".into(), json!(t));
        }
        if let Some(s) = self.seed {
            doc.insert("seed".into(), json!(s));
        }
        doc.insert("pass".into(), json!(self.pass));
        doc.insert("rows".into(), Value::Array(rows));
        if let Some(d) = &self.details {
            doc.insert("details".into(), d.clone());
        }
        let mut out = serde_json::to_vec_pretty(&Value::Object(doc))?;
        out.push(b'\n');
        Ok(out)
    }

    pub fn write(&self, path: &Path, format: Format, timestamp: Option<u64>) -> Result<()> {
        let bytes = match format {
            Format::Csv => self.to_csv()?,
            Format::Json => self.to_json(timestamp)?,
        };
        if path.as_os_str() == "-" {
            std::io::stdout().write_all(&bytes)?;
            return Ok(());
        }
        std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
    }
}
