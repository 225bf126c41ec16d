use std::io::Write;

use serde_json::{json, Map, Value};

/// One table cell. Floats are written in scientific notation with 15 digits
/// after the point.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.15e}"),
            Cell::Int(k) => k.to_string(),
            Cell::Text(t) => t.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(_) => Value::Null,
            Cell::Int(k) => json!(k),
            Cell::Text(t) => json!(t),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(k: usize) -> Self {
        Cell::Int(k as i64)
    }
}

impl From<i64> for Cell {
    fn from(k: i64) -> Self {
        Cell::Int(k)
    }
}

impl From<&str> for Cell {
    fn from(t: &str) -> Self {
        Cell::Text(t.to_string())
    }
}

impl From<String> for Cell {
    fn from(t: String) -> Self {
        Cell::Text(t)
    }
}

/// A named quantity with an optional acceptance bound.
///
/// Informational checks carry no tolerance and always pass.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: None,
            pass: true,
        }
    }

    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance: Some(tolerance),
            pass: value <= tolerance,
        }
    }

    /// Passes when `condition` holds; the value is reported as 1 or 0.
    pub fn flag(name: impl Into<String>, condition: bool) -> Self {
        Self {
            name: name.into(),
            value: if condition { 1.0 } else { 0.0 },
            tolerance: None,
            pass: condition,
        }
    }
}

/// Output of one subcommand.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub config: Vec<(String, Value)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            config: Vec::new(),
            columns,
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: Value) {
        self.config.push((key.to_string(), value));
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Row table, a blank line, then the check table.
    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        {
            let mut w = csv::WriterBuilder::new().flexible(true).from_writer(&mut *out);
            w.write_record(&self.columns)?;
            for row in &self.rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
            w.flush()?;
        }
        writeln!(out)?;
        let mut w = csv::Writer::from_writer(&mut *out);
        w.write_record(["check", "value", "tolerance", "pass"])?;
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                format!("{:.15e}", c.value),
                c.tolerance.map(|t| format!("{t:.15e}")).unwrap_or_default(),
                c.pass.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let config: Map<String, Value> = self.config.iter().cloned().collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(k, v)| (k.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "value": if c.value.is_finite() { json!(c.value) } else { Value::Null },
                    "tolerance": c.tolerance,
                    "pass": c.pass,
                })
            })
            .collect();
        json!({ "config": config, "rows": rows, "checks": checks })
    }

    pub fn write_json(&self, out: &mut dyn Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
        writeln!(out)
    }
}
