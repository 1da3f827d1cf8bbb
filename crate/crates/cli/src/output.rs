//! CSV tables and JSON reports under a common path prefix.
//!
//! Every written file is tracked so a failed run can remove its partial outputs.

use crate::error::CliResult;
use serde::Serialize;
use std::path::PathBuf;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt17(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

/// Seventeen significant digits in scientific notation.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Column header plus rows of one table.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Files written under one prefix.
#[derive(Debug)]
pub struct OutputSet {
    prefix: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputSet {
    pub fn new(prefix: &str) -> CliResult<Self> {
        let prefix = PathBuf::from(prefix);
        if let Some(parent) = prefix.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent)?;
            }
        }
        Ok(OutputSet { prefix, written: Vec::new() })
    }

    fn path(&self, suffix: &str) -> PathBuf {
        let mut s = self.prefix.as_os_str().to_owned();
        s.push(format!("_{suffix}"));
        PathBuf::from(s)
    }

    /// Write `<prefix>_<name>.csv` (RFC 4180).
    pub fn write_table(&mut self, name: &str, table: &Table) -> CliResult<PathBuf> {
        let path = self.path(&format!("{name}.csv"));
        self.written.push(path.clone());
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_path(&path)?;
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(path)
    }

    /// Write `<prefix>_report.json`.
    pub fn write_report<T: Serialize>(&mut self, report: &T) -> CliResult<PathBuf> {
        let path = self.path("report.json");
        self.written.push(path.clone());
        let text = serde_json::to_string_pretty(report).map_err(|e| crate::error::CliError::Io(e.to_string()))?;
        std::fs::write(&path, text + "\n")?;
        Ok(path)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Delete everything written so far.
    pub fn remove_all(&mut self) {
        for p in self.written.drain(..) {
            let _ = std::fs::remove_file(p);
        }
    }
}
