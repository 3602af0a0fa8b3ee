use std::fmt;
use std::io::Write;

use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::args::Format;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::svg::Plot;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) if v.is_nan() => f.write_str("nan"),
            Cell::Float(v) if v.is_infinite() => f.write_str(if *v > 0.0 { "inf" } else { "-inf" }),
            Cell::Float(v) if *v != 0.0 && (v.abs() < 1e-4 || v.abs() >= 1e16) => write!(f, "{v:e}"),
            Cell::Float(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Int(v) => s.serialize_i64(*v),
            Cell::Float(v) if v.is_finite() => s.serialize_f64(*v),
            Cell::Float(_) | Cell::Text(_) => s.serialize_str(&self.to_string()),
            Cell::Empty => s.serialize_none(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(i64::from(v))
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

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything a command produces.
#[derive(Clone, Debug)]
pub struct Report {
    pub tables: Vec<Table>,
    pub plot: Plot,
}

fn unix_time() -> u64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

pub fn render(report: &Report, config: &RunConfig) -> CliResult<Vec<u8>> {
    match config.format {
        Format::Csv => render_csv(report, config),
        Format::Json => render_json(report, config),
        Format::Svg => Ok(report.plot.render().into_bytes()),
    }
}

fn render_csv(report: &Report, config: &RunConfig) -> CliResult<Vec<u8>> {
    let mut out = Vec::new();
    writeln!(out, "# hypercube-pst {}", env!("CARGO_PKG_VERSION"))?;
    if config.timestamp {
        writeln!(out, "# generated-unix: {}", unix_time())?;
    }
    let echo = serde_json::to_value(config).map_err(|e| CliError::Runtime(e.to_string()))?;
    if let serde_json::Value::Object(map) = echo {
        for (k, v) in map {
            writeln!(out, "# {k}: {v}")?;
        }
    }
    let runtime = |e: csv::Error| CliError::Runtime(e.to_string());
    for table in &report.tables {
        writeln!(out, "# table: {}", table.name)?;
        let mut w = csv::WriterBuilder::new().from_writer(&mut out);
        w.write_record(&table.columns).map_err(runtime)?;
        for row in &table.rows {
            w.write_record(row.iter().map(|c| c.to_string())).map_err(runtime)?;
        }
        w.flush()?;
    }
    Ok(out)
}

fn render_json(report: &Report, config: &RunConfig) -> CliResult<Vec<u8>> {
    struct Doc<'a>(&'a Report, &'a RunConfig);
    impl Serialize for Doc<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            let mut m = s.serialize_map(None)?;
            m.serialize_entry("version", env!("CARGO_PKG_VERSION"))?;
            if self.1.timestamp {
                m.serialize_entry("generated-unix", &unix_time())?;
            }
            m.serialize_entry("config", self.1)?;
            m.serialize_entry("tables", &self.0.tables)?;
            m.end()
        }
    }
    let mut out = serde_json::to_vec_pretty(&Doc(report, config)).map_err(|e| CliError::Runtime(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}
