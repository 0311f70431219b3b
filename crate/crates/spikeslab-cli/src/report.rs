//! Report types and their file formats.
//!
//! Reports are deterministic: given the same input and seed, the emitted
//! bytes are identical across runs. Anything timing-based therefore goes
//! to stdout, never into a report file. Both formats round-trip: parsing
//! an emitted file reconstructs the exact report value.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

/// Statistical configuration echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub command: String,
    pub prior: String,
    /// Hyperparameters in effect, resolved to numbers (name, value).
    pub hyper: Vec<(String, f64)>,
    pub a_omega: f64,
    pub b_omega: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub full_model_warmup: usize,
    pub seed: u64,
    pub standardize_response: bool,
}

/// Per-covariate selection results on the analysis (standardized) scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnReport {
    pub name: String,
    /// Raw sample mean before centering.
    pub mean: f64,
    /// Divisor applied to the raw column; 1 for binary columns.
    pub scale: f64,
    pub binary: bool,
    pub incl_prob: f64,
    pub in_median_model: bool,
    /// Posterior coefficient mean on the analysis scale.
    pub alpha_mean: f64,
    /// Inefficiency factor of the probability series; absent when the
    /// series is constant.
    pub iact: Option<f64>,
    pub ess: Option<f64>,
}

/// Complete fit output. Location-independent: the data path is not
/// recorded, so reports from identical inputs are byte-identical anywhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub config: ConfigEcho,
    pub response: String,
    /// Response divisor (full-model residual standard deviation when
    /// standardization was requested, otherwise 1).
    pub response_scale: f64,
    pub rows_read: usize,
    pub rows_excluded: usize,
    pub rows_used: usize,
    pub columns: Vec<ColumnReport>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

fn parse_opt(cell: &str) -> Result<Option<f64>> {
    if cell.is_empty() {
        Ok(None)
    } else {
        Ok(Some(cell.parse()?))
    }
}

impl FitReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("malformed JSON report")
    }

    /// One row per covariate, preceded by `#` echo lines carrying the
    /// configuration. Default float formatting round-trips exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let echo = &self.config;
        let hyper = echo
            .hyper
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(out, "# command: {}", echo.command);
        let _ = writeln!(out, "# prior: {}", echo.prior);
        let _ = writeln!(out, "# hyper: {hyper}");
        let _ = writeln!(out, "# a_omega: {}", echo.a_omega);
        let _ = writeln!(out, "# b_omega: {}", echo.b_omega);
        let _ = writeln!(out, "# iterations: {}", echo.iterations);
        let _ = writeln!(out, "# burn_in: {}", echo.burn_in);
        let _ = writeln!(out, "# full_model_warmup: {}", echo.full_model_warmup);
        let _ = writeln!(out, "# seed: {}", echo.seed);
        let _ = writeln!(out, "# standardize_response: {}", echo.standardize_response);
        let _ = writeln!(out, "# response: {}", self.response);
        let _ = writeln!(out, "# response_scale: {}", self.response_scale);
        let _ = writeln!(out, "# rows_read: {}", self.rows_read);
        let _ = writeln!(out, "# rows_excluded: {}", self.rows_excluded);
        let _ = writeln!(out, "# rows_used: {}", self.rows_used);

        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "column",
            "mean",
            "scale",
            "binary",
            "incl_prob",
            "in_median_model",
            "alpha_mean",
            "iact",
            "ess",
        ])
        .expect("csv header");
        for c in &self.columns {
            w.write_record([
                c.name.clone(),
                c.mean.to_string(),
                c.scale.to_string(),
                c.binary.to_string(),
                c.incl_prob.to_string(),
                c.in_median_model.to_string(),
                c.alpha_mean.to_string(),
                fmt_opt(c.iact),
                fmt_opt(c.ess),
            ])
            .expect("csv row");
        }
        let body = w.into_inner().expect("csv buffer");
        out.push_str(&String::from_utf8(body).expect("csv is utf-8"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut echo = std::collections::BTreeMap::new();
        for line in text.lines().take_while(|l| l.starts_with('#')) {
            let rest = line.trim_start_matches('#').trim_start();
            let (key, value) = rest
                .split_once(": ")
                .or_else(|| rest.split_once(':'))
                .with_context(|| format!("malformed echo line {line:?}"))?;
            echo.insert(key.to_string(), value.to_string());
        }
        let get = |key: &str| -> Result<&str> {
            echo.get(key)
                .map(String::as_str)
                .with_context(|| format!("echo line {key:?} missing"))
        };
        let hyper = get("hyper")?
            .split_whitespace()
            .map(|pair| -> Result<(String, f64)> {
                let (k, v) = pair
                    .split_once('=')
                    .with_context(|| format!("malformed hyper entry {pair:?}"))?;
                Ok((k.to_string(), v.parse()?))
            })
            .collect::<Result<Vec<_>>>()?;
        let config = ConfigEcho {
            command: get("command")?.to_string(),
            prior: get("prior")?.to_string(),
            hyper,
            a_omega: get("a_omega")?.parse()?,
            b_omega: get("b_omega")?.parse()?,
            iterations: get("iterations")?.parse()?,
            burn_in: get("burn_in")?.parse()?,
            full_model_warmup: get("full_model_warmup")?.parse()?,
            seed: get("seed")?.parse()?,
            standardize_response: get("standardize_response")?.parse()?,
        };

        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let mut columns = Vec::new();
        for record in reader.records() {
            let r = record.context("malformed report row")?;
            if r.len() != 9 {
                bail!("report row has {} fields, expected 9", r.len());
            }
            columns.push(ColumnReport {
                name: r[0].to_string(),
                mean: r[1].parse()?,
                scale: r[2].parse()?,
                binary: r[3].parse()?,
                incl_prob: r[4].parse()?,
                in_median_model: r[5].parse()?,
                alpha_mean: r[6].parse()?,
                iact: parse_opt(&r[7])?,
                ess: parse_opt(&r[8])?,
            });
        }

        Ok(FitReport {
            config,
            response: get("response")?.to_string(),
            response_scale: get("response_scale")?.parse()?,
            rows_read: get("rows_read")?.parse()?,
            rows_excluded: get("rows_excluded")?.parse()?,
            rows_used: get("rows_used")?.parse()?,
            columns,
        })
    }
}

/// Reads a fit report in either format, deciding by extension.
pub fn read_fit_report(path: &Path) -> Result<FitReport> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => FitReport::from_json(&text),
        Some("csv") => FitReport::from_csv(&text),
        other => bail!("unknown report extension {other:?}"),
    }
}

/// Mixing diagnostics for the columns of a trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseReport {
    pub command: String,
    pub rows: Vec<DiagnoseRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnoseRow {
    pub name: String,
    pub draws: usize,
    pub iact: Option<f64>,
    pub ess: Option<f64>,
}

impl DiagnoseReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# command: diagnose\n");
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["column", "draws", "iact", "ess"]).expect("csv header");
        for r in &self.rows {
            w.write_record([
                r.name.clone(),
                r.draws.to_string(),
                fmt_opt(r.iact),
                fmt_opt(r.ess),
            ])
            .expect("csv row");
        }
        let body = w.into_inner().expect("csv buffer");
        out.push_str(&String::from_utf8(body).expect("csv is utf-8"));
        out
    }
}
