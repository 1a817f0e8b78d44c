//! Result files: CSV tables and versioned JSON grids.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::sweep::{CellOutcome, ResultGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

const METRIC_COLUMNS: [&str; 6] = ["user_index", "ber", "evm_rms_pct", "sndr_db", "enob", "array_gain_db"];

fn fmt_f64(v: f64) -> String {
    // shortest representation that parses back to the same value
    format!("{v}")
}

/// One row per (cell, user), or one row per failed cell; rows follow the
/// grid's row-major order, then user index.
pub fn write_csv<W: Write>(grid: &ResultGrid, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = grid.axes.iter().map(|a| a.variable.name()).collect();
    header.extend(METRIC_COLUMNS);
    header.push("error");
    w.write_record(&header)?;

    for cell in &grid.cells {
        let axis_values: Vec<String> = cell
            .index
            .iter()
            .zip(&grid.axes)
            .map(|(&i, a)| fmt_f64(a.values[i]))
            .collect();
        match &cell.outcome {
            CellOutcome::Ok { records } => {
                let mut records = records.clone();
                records.sort_by_key(|r| r.user_index);
                for r in records {
                    let mut row = axis_values.clone();
                    row.push(r.user_index.to_string());
                    row.extend([r.ber, r.evm_rms_pct, r.sndr_db, r.enob, r.array_gain_db].map(fmt_f64));
                    row.push(String::new());
                    w.write_record(&row)?;
                }
            }
            CellOutcome::Failed { error } => {
                let mut row = axis_values.clone();
                row.extend(std::iter::repeat_n(String::new(), METRIC_COLUMNS.len()));
                row.push(error.clone());
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// SIR_min per outer grid point and user; sentinels are written as
/// `-inf` (never limited) and `inf` (never reached).
pub fn write_sir_min_csv<W: Write>(grid: &ResultGrid, out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    let outer = &grid.axes[..grid.axes.len().saturating_sub(1)];
    let mut header: Vec<&str> = outer.iter().map(|a| a.variable.name()).collect();
    header.extend(["user_index", "sir_min_db"]);
    w.write_record(&header)?;
    for e in &grid.sir_min {
        let mut row: Vec<String> = e
            .index
            .iter()
            .zip(outer)
            .map(|(&i, a)| a.values.get(i).copied().map(fmt_f64).unwrap_or_default())
            .collect();
        row.push(e.user_index.to_string());
        row.push(fmt_f64(e.sir_min.as_f64()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(grid: &ResultGrid, out: W) -> Result<(), HarnessError> {
    let mut out = BufWriter::new(out);
    serde_json::to_writer_pretty(&mut out, grid)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

/// Parses and structurally checks a JSON result grid.
pub fn load_results_json(text: &str) -> Result<ResultGrid, HarnessError> {
    let grid: ResultGrid = serde_json::from_str(text)?;
    grid.check()?;
    Ok(grid)
}

/// Writes the grid into `dir` as `<name>.<ext>` (plus `<name>_sir_min.csv`
/// for CSV output with SIR_min results) and returns the paths written.
pub fn emit_results(grid: &ResultGrid, format: OutputFormat, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    std::fs::create_dir_all(dir)?;
    let stem = file_stem(&grid.metadata.spec.name);
    let main = dir.join(format!("{stem}.{}", format.extension()));
    let mut written = vec![main.clone()];
    let file = File::create(&main)?;
    match format {
        OutputFormat::Csv => {
            write_csv(grid, BufWriter::new(file))?;
            if !grid.sir_min.is_empty() {
                let path = dir.join(format!("{stem}_sir_min.csv"));
                write_sir_min_csv(grid, BufWriter::new(File::create(&path)?))?;
                written.push(path);
            }
        }
        OutputFormat::Json => write_json(grid, file)?,
    }
    Ok(written)
}

/// Sweep name reduced to characters safe in a file name.
pub fn file_stem(name: &str) -> String {
    let s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect();
    if s.is_empty() {
        "sweep".to_string()
    } else {
        s
    }
}
