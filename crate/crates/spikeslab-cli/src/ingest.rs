//! CSV ingestion: header-based column selection, missing-row exclusion,
//! and covariate standardization.

use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;

/// Numeric columns extracted from a CSV file, column-major, with rows
/// containing missing values dropped.
#[derive(Debug)]
pub struct NumericTable {
    /// Selected column names, in request order (header order when the
    /// request was empty). Never reordered beyond that.
    pub names: Vec<String>,
    /// `data[k]` holds column `k` over the retained rows.
    pub data: Vec<Vec<f64>>,
    pub rows_read: usize,
    pub rows_excluded: usize,
}

impl NumericTable {
    pub fn rows_used(&self) -> usize {
        self.rows_read - self.rows_excluded
    }
}

/// A cell counts as missing when empty or one of the usual placeholders;
/// anything else must parse as a number.
fn is_missing(cell: &str) -> bool {
    matches!(
        cell.to_ascii_lowercase().as_str(),
        "" | "na" | "nan" | "null"
    )
}

/// Reads the named columns (all columns when `wanted` is empty), excluding
/// every row with a missing value in any selected column. Lines starting
/// with `#` are skipped, so the tool's own reports can be re-ingested.
pub fn read_columns(path: &Path, wanted: &[String]) -> Result<NumericTable> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;

    let headers: Vec<String> = reader
        .headers()
        .context("missing header row")?
        .iter()
        .map(str::to_string)
        .collect();
    for (i, name) in headers.iter().enumerate() {
        if headers[..i].contains(name) {
            bail!("column {name:?} appears twice in the header");
        }
    }

    let names: Vec<String> = if wanted.is_empty() {
        headers.clone()
    } else {
        wanted.to_vec()
    };
    let mut indices = Vec::with_capacity(names.len());
    for name in &names {
        match headers.iter().position(|h| h == name) {
            Some(i) => indices.push(i),
            None => bail!("column {name:?} not found in {}", path.display()),
        }
    }

    let mut data: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    let mut rows_read = 0;
    let mut rows_excluded = 0;
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("data row {}", row_idx + 1))?;
        rows_read += 1;
        let mut parsed = Vec::with_capacity(names.len());
        let mut missing = false;
        for (&col, name) in indices.iter().zip(&names) {
            let cell = record.get(col).unwrap_or("");
            if is_missing(cell) {
                missing = true;
                break;
            }
            let value: f64 = cell.parse().with_context(|| {
                format!("column {name:?}, data row {}: cannot parse {cell:?}", row_idx + 1)
            })?;
            parsed.push(value);
        }
        if missing {
            rows_excluded += 1;
            continue;
        }
        for (k, value) in parsed.into_iter().enumerate() {
            data[k].push(value);
        }
    }

    Ok(NumericTable {
        names,
        data,
        rows_read,
        rows_excluded,
    })
}

/// Per-column standardization record, kept in the report so the analysis
/// scale can be reconstructed.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    pub name: String,
    /// Raw sample mean (centering itself happens inside the model).
    pub mean: f64,
    /// Divisor applied to the raw values; 1 for binary columns.
    pub scale: f64,
    pub binary: bool,
}

/// Scales metric columns to unit sample variance (divisor N, matching the
/// model's variance convention) and leaves 0/1 columns untouched; both get
/// centered later by the model. Statistics are computed on the rows that
/// survived missing-value exclusion.
pub fn standardize(names: &[String], columns: &[Vec<f64>]) -> Result<(DMatrix<f64>, Vec<Standardization>)> {
    let n = columns.first().map_or(0, Vec::len);
    if n < 2 {
        bail!("need at least 2 complete rows, got {n}");
    }
    let mut stats = Vec::with_capacity(columns.len());
    for (name, col) in names.iter().zip(columns) {
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let msq = col.iter().map(|v| v * v).sum::<f64>() / n as f64;
        if var <= 1e-14 * msq.max(f64::MIN_POSITIVE) {
            bail!("column {name:?} is constant over the retained rows");
        }
        let binary = col.iter().all(|&v| v == 0.0 || v == 1.0);
        let scale = if binary { 1.0 } else { var.sqrt() };
        stats.push(Standardization {
            name: name.clone(),
            mean,
            scale,
            binary,
        });
    }
    let x = DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i] / stats[j].scale);
    Ok((x, stats))
}
