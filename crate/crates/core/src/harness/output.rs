//! Tabular result files: one comma-separated file per algorithm run plus a
//! summary table. Floats are written with Rust's shortest round-trip
//! formatting, so identical runs produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::Result;

/// Per-round records for one algorithm: a strictly increasing round column
/// followed by named value columns.
#[derive(Debug, Clone)]
pub struct RegretTrace {
    pub algorithm: String,
    columns: Vec<&'static str>,
    rows: Vec<(u64, Vec<f64>)>,
}

impl RegretTrace {
    pub fn new(algorithm: impl Into<String>, columns: Vec<&'static str>) -> Self {
        RegretTrace {
            algorithm: algorithm.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, t: u64, values: Vec<f64>) {
        assert_eq!(values.len(), self.columns.len(), "column count mismatch");
        let expected = self.rows.last().map_or(1, |(last, _)| last + 1);
        assert_eq!(t, expected, "round column must increase from 1 by 1");
        self.rows.push((t, values));
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Last recorded value of a named column.
    pub fn final_value(&self, column: &str) -> Option<f64> {
        let idx = self.columns.iter().position(|&c| c == column)?;
        self.rows.last().map(|(_, values)| values[idx])
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        write!(out, "t")?;
        for column in &self.columns {
            write!(out, ",{column}")?;
        }
        out.write_all(b"\n")?;
        for (t, values) in &self.rows {
            write!(out, "{t}")?;
            for value in values {
                write!(out, ",{value}")?;
            }
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }
}

/// One line of the run summary.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub algorithm: String,
    /// Baseline learning rate, when the algorithm has one.
    pub rate: Option<f64>,
    pub metric: String,
    pub value: f64,
}

pub(crate) fn write_summary(path: &Path, seed: u64, rows: &[SummaryRow]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(b"algorithm,rate,metric,value,seed\n")?;
    for row in rows {
        let rate = row.rate.map_or(String::new(), |r| r.to_string());
        writeln!(
            out,
            "{},{},{},{},{}",
            row.algorithm, rate, row.metric, row.value, seed
        )?;
    }
    out.flush()?;
    Ok(())
}
