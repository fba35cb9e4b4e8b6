//! Byte-stable CSV and JSON emission.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// 17 significant digits in scientific notation; `inf` / `-inf` for
/// infinities. NaN is refused.
pub fn format_float(column: &str, x: f64) -> Result<String, CliError> {
    if x.is_nan() {
        return Err(CliError::NaN(column.to_owned()));
    }
    if x.is_infinite() {
        return Ok(if x > 0.0 { "inf" } else { "-inf" }.to_owned());
    }
    Ok(format!("{x:.16e}"))
}

pub fn parse_float(column: &str, s: &str) -> Result<f64, CliError> {
    match s {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => {
            let x: f64 = s
                .parse()
                .map_err(|_| CliError::Schema(format!("column `{column}`: not a number: {s:?}")))?;
            if x.is_nan() {
                return Err(CliError::Schema(format!("column `{column}` holds NaN")));
            }
            Ok(x)
        }
    }
}

pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
}

/// Rows are validated against the header width as they are added.
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, cells: Vec<Cell>) -> Result<(), CliError> {
        assert_eq!(
            cells.len(),
            self.header.len(),
            "row width must match header"
        );
        let row = cells
            .into_iter()
            .zip(&self.header)
            .map(|(cell, col)| match cell {
                Cell::Float(x) => format_float(col, x),
                Cell::Int(i) => Ok(i.to_string()),
                Cell::Text(s) => Ok(s),
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.rows.push(row);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn prepare_dir(dir: &Path) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    Ok(dir.to_path_buf())
}

/// Provenance block attached to every JSON artifact.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub artifact_version: &'static str,
    pub command: &'static str,
    pub seed: u64,
}

impl Provenance {
    pub fn new(command: &'static str, seed: u64) -> Self {
        Self {
            artifact_version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
        }
    }
}
