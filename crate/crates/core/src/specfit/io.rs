//! CSV loading for transmission spectra.

use std::path::Path;

use thiserror::Error;

use crate::numeric::Real;
use crate::specfit::fit::{FreqUnit, SpectrumData};

#[derive(Debug, Error)]
pub enum SpectrumIoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed row at line {line}: {detail}")]
    MalformedRow { line: usize, detail: String },
    #[error("spectrum file contains no data rows")]
    EmptyFile,
    #[error("duplicate detuning value {value} at line {line}")]
    DuplicateDetuning { value: f64, line: usize },
}

/// Loads a two-column `delta,transmission` CSV. An optional header row is
/// skipped; rows are sorted by ascending detuning.
pub fn load_spectrum_csv<R: Real>(
    path: &Path,
    unit: FreqUnit,
) -> Result<SpectrumData<R>, SpectrumIoError> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<(f64, f64, usize)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut cols = trimmed.split(',');
        let (Some(c0), Some(c1), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(SpectrumIoError::MalformedRow {
                line: line_no,
                detail: "expected exactly two columns".into(),
            });
        };
        let c0 = c0.trim();
        let c1 = c1.trim();
        if idx == 0 && c0.parse::<f64>().is_err() {
            // Header row.
            continue;
        }
        let parse = |s: &str| -> Result<f64, SpectrumIoError> {
            s.parse().map_err(|_| SpectrumIoError::MalformedRow {
                line: line_no,
                detail: format!("not a number: {s:?}"),
            })
        };
        rows.push((parse(c0)?, parse(c1)?, line_no));
    }
    if rows.is_empty() {
        return Err(SpectrumIoError::EmptyFile);
    }
    rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    for w in rows.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(SpectrumIoError::DuplicateDetuning {
                value: w[1].0,
                line: w[1].2,
            });
        }
    }
    Ok(SpectrumData {
        detuning: rows.iter().map(|r| R::of(r.0)).collect(),
        transmission: rows.iter().map(|r| R::of(r.1)).collect(),
        unit,
        source: path.display().to_string(),
    })
}
