//! Columnar (CSV) and structured (JSON) renderings of a result table.

use std::fmt;

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl Cell {
    /// Numeric view of the cell, if it has one.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Float(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    fn parse(raw: &str) -> Cell {
        if let Ok(v) = raw.parse::<i64>() {
            return Cell::Int(v);
        }
        match raw {
            "true" => return Cell::Bool(true),
            "false" => return Cell::Bool(false),
            _ => {}
        }
        match raw.parse::<f64>() {
            Ok(v) => Cell::Float(v),
            Err(_) => Cell::Text(raw.to_owned()),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Float(v) if v.is_finite() => Value::from(*v),
            Cell::Float(v) => Value::from(float_text(*v)),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }

    fn from_json(v: &Value) -> Result<Cell, String> {
        Ok(match v {
            Value::Bool(b) => Cell::Bool(*b),
            Value::Number(n) => match n.as_i64() {
                Some(i) if !n.is_f64() => Cell::Int(i),
                _ => Cell::Float(n.as_f64().ok_or("number out of range")?),
            },
            Value::String(s) => match s.as_str() {
                "NaN" | "inf" | "-inf" => Cell::Float(s.parse().expect("special float")),
                _ => Cell::Text(s.clone()),
            },
            other => return Err(format!("unexpected cell {other}")),
        })
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Float(v) => f.write_str(&float_text(*v)),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Bool(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn float_text(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{v:.16e}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[value(name = "columnar", alias = "csv")]
    Columnar,
    #[value(name = "structured", alias = "json")]
    Structured,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    /// Ordered header entries.
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_owned(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Columnar => self.to_columnar(),
            Format::Structured => self.to_structured(),
        }
    }

    /// `# key: value` header lines, then a CSV header row and the data rows.
    pub fn to_columnar(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))
                .expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells"));
        out
    }

    pub fn from_columnar(text: &str) -> Result<Self, String> {
        let mut meta = Vec::new();
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            let Some(entry) = line.strip_prefix("# ") else { break };
            let entry = entry.trim_end_matches('\n');
            let (k, v) = entry
                .split_once(": ")
                .ok_or_else(|| format!("malformed header line {entry:?}"))?;
            meta.push((k.to_owned(), v.to_owned()));
            body_start += line.len();
        }
        let mut r = csv::ReaderBuilder::new().from_reader(&text.as_bytes()[body_start..]);
        let columns = r
            .headers()
            .map_err(|e| e.to_string())?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec.map_err(|e| e.to_string())?.iter().map(Cell::parse).collect());
        }
        Ok(Self { meta, columns, rows })
    }

    /// `{"meta": {...}, "columns": [...], "rows": [[...], ...]}`.
    pub fn to_structured(&self) -> String {
        let meta: Map<String, Value> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), Value::from(v.as_str())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        let doc = serde_json::json!({ "meta": meta, "columns": self.columns, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_structured(text: &str) -> Result<Self, String> {
        let doc: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let meta = doc["meta"]
            .as_object()
            .ok_or("missing meta")?
            .iter()
            .map(|(k, v)| Ok((k.clone(), v.as_str().ok_or("meta values are strings")?.to_owned())))
            .collect::<Result<Vec<_>, String>>()?;
        let columns = doc["columns"]
            .as_array()
            .ok_or("missing columns")?
            .iter()
            .map(|c| {
                c.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| "column names are strings".to_owned())
            })
            .collect::<Result<Vec<_>, String>>()?;
        let rows = doc["rows"]
            .as_array()
            .ok_or("missing rows")?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or("rows are arrays")?
                    .iter()
                    .map(Cell::from_json)
                    .collect()
            })
            .collect::<Result<Vec<_>, String>>()?;
        Ok(Self { meta, columns, rows })
    }
}
