//! Result tables and their CSV / JSON encodings.
//!
//! CSV: `#`-prefixed metadata lines, one header row, one line per row.
//! JSON: `{"meta": {...}, "rows": [{column: value, ...}, ...]}`.
//! Floats use the shortest representation that round-trips.

use std::io::Write;

use serde_json::{json, Map, Value};

use super::config::Format;
use crate::eigensolver::SCHEME_VERSION;
use crate::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(x) => format!("{x:e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(_) | Cell::Empty => Value::Null,
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<i32> for Cell {
    fn from(i: i32) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: &'static str,
    /// `"1"` for pure numbers and labels.
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub parameters: Value,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, parameters: Value, columns: Vec<Column>) -> Self {
        Self {
            command,
            parameters,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    fn meta(&self) -> Value {
        let columns: Vec<Value> = self
            .columns
            .iter()
            .map(|c| json!({ "name": c.name, "unit": c.unit }))
            .collect();
        json!({
            "artifact": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "scheme_version": SCHEME_VERSION,
            "command": self.command,
            "parameters": self.parameters,
            "columns": columns,
            "unit_system": {
                "lambda_e": "0.38616 pm",
                "tau_C": "1.28809e-21 s",
                "energy": "m_e c^2 = 0.51100 MeV",
                "field": "b0 = B0 lambda_e^n / 4.414e13 G; B0 in G pm^-n",
                "speed": "c"
            }
        })
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        let meta = self.meta();
        writeln!(out, "# {} {} (scheme {})", meta["artifact"].as_str().unwrap_or_default(), meta["version"].as_str().unwrap_or_default(), SCHEME_VERSION)?;
        writeln!(out, "# command: {}", self.command)?;
        writeln!(out, "# parameters: {}", self.parameters)?;
        writeln!(out, "# unit_system: {}", meta["unit_system"])?;
        let units: Vec<String> = self
            .columns
            .iter()
            .map(|c| format!("{}={}", c.name, c.unit))
            .collect();
        writeln!(out, "# units: {}", units.join("; "))?;
        let names: Vec<&str> = self.columns.iter().map(|c| c.name).collect();
        writeln!(out, "{}", names.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    fn write_json(&self, out: &mut dyn Write) -> Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.name.to_string(), v.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        serde_json::to_writer_pretty(&mut *out, &json!({ "meta": self.meta(), "rows": rows }))?;
        writeln!(out)?;
        Ok(())
    }
}
