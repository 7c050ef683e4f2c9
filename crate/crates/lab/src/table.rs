use std::io::Write;
use std::str::FromStr;

use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => bail!("unknown format {other:?} (csv, json)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Int(i) => i.to_string(),
            Value::Float(x) => format_float(*x),
            Value::Text(s) => s.clone(),
            Value::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            // JSON has no infinities
            Value::Float(x) if !x.is_finite() => json!(format_float(*x)),
            Value::Float(x) => json!(x),
            Value::Int(i) => json!(i),
            Value::Text(s) => json!(s),
            Value::Bool(b) => json!(b),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(x) => Some(*x),
            Value::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

fn format_float(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else {
        format!("{x:e}")
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

impl From<usize> for Value {
    fn from(x: usize) -> Self {
        Value::Int(x as i64)
    }
}

impl From<u64> for Value {
    fn from(x: u64) -> Self {
        Value::Int(x as i64)
    }
}

impl From<bool> for Value {
    fn from(x: bool) -> Self {
        Value::Bool(x)
    }
}

impl From<&str> for Value {
    fn from(x: &str) -> Self {
        Value::Text(x.into())
    }
}

impl From<String> for Value {
    fn from(x: String) -> Self {
        Value::Text(x)
    }
}

/// A named table with free-form notes; rows are in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(title: &str, columns: &[&str]) -> Self {
        Table {
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width in table {}", self.title);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one column, in row order.
    pub fn values(&self, name: &str) -> Vec<&Value> {
        let c = self.column(name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| &r[c]).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "title": self.title,
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Value::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Value::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        match format {
            Format::Csv => self.write_csv(&mut buf)?,
            Format::Json => {
                serde_json::to_writer_pretty(&mut buf, &self.to_json())?;
                buf.push(b'\n');
            }
        }
        Ok(buf)
    }
}

/// Several tables in one output: CSV tables are separated by a blank line.
pub fn render_all(tables: &[Table], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            for (i, t) in tables.iter().enumerate() {
                if i > 0 {
                    buf.push(b'\n');
                }
                t.write_csv(&mut buf)?;
            }
            Ok(buf)
        }
        Format::Json => {
            let all: Vec<_> = tables.iter().map(Table::to_json).collect();
            let mut buf = serde_json::to_vec_pretty(&all)?;
            buf.push(b'\n');
            Ok(buf)
        }
    }
}
