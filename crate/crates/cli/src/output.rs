//! CSV and JSON emission for result tables.

use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) if x.is_nan() => "nan".into(),
            Cell::Num(x) => number(*x),
            Cell::Text(s) if s.contains([',', '"', '\n']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            // JSON has no inf or nan
            Cell::Num(x) if !x.is_finite() => Value::Null,
            Cell::Num(x) => json!(x),
            Cell::Text(s) => json!(s),
        }
    }
}

/// Shortest round-trip form, in exponent notation far from unity.
fn number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

#[derive(Debug, Clone)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: impl Into<String>) -> Self {
        Column {
            name: name.into(),
            unit: unit.into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    /// Free-text lines for the header (sign conventions and such).
    pub notes: Vec<String>,
    /// Extra top-level JSON members.
    pub extra: Map<String, Value>,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<Column>) -> Self {
        Table {
            command,
            columns,
            rows: Vec::new(),
            notes: Vec::new(),
            extra: Map::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

const NATURAL_UNITS: &str = "natural units: hbar = m = omega = k_B = 1; energies in hbar*omega, entropies in k_B, x0 = q0*sqrt(2 m omega/hbar)";

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn render_csv(t: &Table, cfg: &RunConfig) -> String {
    let mut s = format!("# szilard {}\n", t.command);
    if !cfg.no_timestamp {
        s += &format!("# generated_unix = {}\n", timestamp());
    }
    for (k, v) in cfg.echo() {
        s += &format!("# {k} = {v}\n");
    }
    s += &format!("# {NATURAL_UNITS}\n");
    for c in &t.columns {
        s += &format!("# unit {} = {}\n", c.name, c.unit);
    }
    for n in &t.notes {
        s += &format!("# {n}\n");
    }
    let names: Vec<&str> = t.columns.iter().map(|c| c.name.as_str()).collect();
    s += &names.join(",");
    s.push('\n');
    for r in &t.rows {
        let cells: Vec<String> = r.iter().map(Cell::csv).collect();
        s += &cells.join(",");
        s.push('\n');
    }
    s
}

pub fn render_json(t: &Table, cfg: &RunConfig) -> String {
    let mut config = Map::new();
    config.insert("command".into(), json!(t.command));
    for (k, v) in cfg.echo() {
        // echo values are plain numbers or booleans
        let val = serde_json::from_str(&v).unwrap_or(Value::String(v));
        config.insert(k.into(), val);
    }
    if !cfg.no_timestamp {
        config.insert("generated_unix".into(), json!(timestamp()));
    }
    config.insert("unit_system".into(), json!(NATURAL_UNITS));
    let units: Map<String, Value> = t
        .columns
        .iter()
        .map(|c| (c.name.clone(), json!(c.unit)))
        .collect();
    config.insert("units".into(), Value::Object(units));
    config.insert("notes".into(), json!(t.notes));
    let mut top = Map::new();
    top.insert("config".into(), Value::Object(config));
    top.insert(
        "columns".into(),
        json!(t.columns.iter().map(|c| &c.name).collect::<Vec<_>>()),
    );
    top.insert(
        "rows".into(),
        Value::Array(
            t.rows
                .iter()
                .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                .collect(),
        ),
    );
    for (k, v) in &t.extra {
        top.insert(k.clone(), v.clone());
    }
    let mut out = serde_json::to_string_pretty(&Value::Object(top)).expect("serializable");
    out.push('\n');
    out
}

pub fn render(t: &Table, cfg: &RunConfig) -> String {
    match cfg.format {
        Format::Csv => render_csv(t, cfg),
        Format::Json => render_json(t, cfg),
    }
}

/// Writes to `cfg.out`, or stdout when no path is set.
pub fn emit(t: &Table, cfg: &RunConfig) -> anyhow::Result<()> {
    let text = render(t, cfg);
    match &cfg.out {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| anyhow::anyhow!("cannot write {}: {e}", p.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}
