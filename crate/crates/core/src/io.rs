//! CSV and JSON output: RFC-4180 CSV with a header row and 17 significant
//! digits, pretty-printed JSON metadata.

use crate::error::Result;
use serde::Serialize;
use std::fs;
use std::path::Path;

/// A float with 17 significant digits (round-trips exactly).
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    format!("{v:.16e}")
}

/// A CSV cell: integers stay integers, floats get 17 digits.
#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
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

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(f) => fmt_f64(*f),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// Write `rows` under `header` to `path`, creating parent directories.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r.iter().map(Cell::render))?;
    }
    w.flush()?;
    Ok(())
}

/// Read a CSV written by `write_csv` back as (header, rows of strings).
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_string).collect();
    let rows = r.records().map(|rec| Ok(rec?.iter().map(str::to_string).collect())).collect::<Result<Vec<_>>>()?;
    Ok((header, rows))
}

/// Pretty-printed JSON.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}
