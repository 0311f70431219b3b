//! The `fit` command: ingest, standardize, sample, report.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

use spikeslab::diagnostics::{summarize, SelectionReport};
use spikeslab::samplers::run_mcmc;
use spikeslab::{ChainOutput, Dataset, McmcConfig};

use crate::cli::{resolve_chain, resolve_prior, FitCmd, Format, ResolvedPrior};
use crate::ingest::{read_columns, standardize, Standardization};
use crate::report::{ColumnReport, ConfigEcho, FitReport};

/// Everything `fit` needs from disk: the analysis-scale model inputs plus
/// the bookkeeping that goes into the report.
pub struct PreparedData {
    pub dataset: Dataset,
    pub covariates: Vec<String>,
    pub stats: Vec<Standardization>,
    pub response: String,
    pub response_scale: f64,
    pub rows_read: usize,
    pub rows_excluded: usize,
}

/// Reads and standardizes the analysis sample. Covariate statistics are
/// computed after missing-row exclusion; the optional response scaling
/// divides by the full-model residual standard deviation.
pub fn prepare(
    path: &Path,
    response: &str,
    covariates: &[String],
    standardize_response: bool,
) -> Result<PreparedData> {
    if covariates.iter().any(|c| c == response) {
        bail!("response {response:?} also listed as a covariate");
    }

    // Resolve the covariate list against the header before reading values
    // so auto-selection (every column but the response) keeps file order.
    let covariates: Vec<String> = if covariates.is_empty() {
        let all = read_header(path)?;
        if !all.iter().any(|c| c == response) {
            bail!("column {response:?} not found in {}", path.display());
        }
        all.into_iter().filter(|c| c != response).collect()
    } else {
        covariates.to_vec()
    };
    if covariates.is_empty() {
        bail!("no covariate columns left after removing the response");
    }

    let mut selected = vec![response.to_string()];
    selected.extend(covariates.iter().cloned());
    let table = read_columns(path, &selected)?;
    if table.rows_used() < 2 {
        bail!(
            "only {} complete rows remain of {} read",
            table.rows_used(),
            table.rows_read
        );
    }

    let y_raw = table.data[0].clone();
    let (x, stats) = standardize(&table.names[1..], &table.data[1..])?;
    let dataset = Dataset::load(&y_raw, &x, true)?;

    let (dataset, response_scale) = if standardize_response {
        let sd = full_model_residual_sd(&dataset)?;
        let y_scaled: Vec<f64> = y_raw.iter().map(|v| v / sd).collect();
        (Dataset::load(&y_scaled, &x, true)?, sd)
    } else {
        (dataset, 1.0)
    };

    Ok(PreparedData {
        dataset,
        covariates,
        stats,
        response: response.to_string(),
        response_scale,
        rows_read: table.rows_read,
        rows_excluded: table.rows_excluded,
    })
}

fn read_header(path: &Path) -> Result<Vec<String>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    Ok(reader
        .headers()
        .context("missing header row")?
        .iter()
        .map(str::to_string)
        .collect())
}

fn full_model_residual_sd(data: &Dataset) -> Result<f64> {
    let n = data.n();
    let d = data.d();
    if n < d + 2 {
        bail!("standardize-response: needs N >= d + 2, got N = {n}, d = {d}");
    }
    let chol = data
        .gram()
        .clone()
        .cholesky()
        .context("standardize-response: full covariate model is singular")?;
    let alpha = chol.solve(data.xty());
    let fitted = data.x() * &alpha;
    let rss: f64 = (0..n).map(|i| (data.y_c()[i] - fitted[i]).powi(2)).sum();
    let sd = (rss / (n - 1 - d) as f64).sqrt();
    if sd <= 0.0 || !sd.is_finite() {
        bail!("standardize-response: residual standard deviation is {sd}");
    }
    Ok(sd)
}

pub fn run(cmd: &FitCmd) -> Result<()> {
    let prep = prepare(
        &cmd.data,
        &cmd.response,
        &cmd.covariates,
        cmd.standardize_response,
    )?;
    let prior = resolve_prior(cmd.prior, &cmd.hyper, prep.dataset.n())?;
    let mut cfg = resolve_chain(&cmd.chain)?;
    // Traces always accumulate internally: the report's coefficient means
    // come from them. The flag only controls writing the file.
    cfg.store_traces = true;

    let output = run_mcmc(&prep.dataset, &prior.spec, &cfg)?;
    let summary = summarize(&output, None);
    let report = build_report(
        &prep,
        &prior,
        &cfg,
        &output,
        &summary,
        "fit",
        cmd.standardize_response,
    );

    fs::create_dir_all(&cmd.output.out_dir)
        .with_context(|| format!("cannot create {}", cmd.output.out_dir.display()))?;
    let report_path = match cmd.output.format {
        Format::Csv => {
            let p = cmd.output.out_dir.join("report.csv");
            fs::write(&p, report.to_csv())?;
            p
        }
        Format::Json => {
            let p = cmd.output.out_dir.join("report.json");
            fs::write(&p, report.to_json())?;
            p
        }
    };

    println!(
        "read {} rows: {} used, {} excluded (missing values)",
        report.rows_read, report.rows_used, report.rows_excluded
    );
    if cmd.standardize_response {
        println!(
            "response scaled by {:.6} (full-model residual sd)",
            report.response_scale
        );
    }
    let mean_eps = mean_defined(&summary.ess_per_sec);
    println!(
        "fit: n = {}, d = {}, prior = {}, seed = {}; sampling {:.2} s{}",
        prep.dataset.n(),
        prep.dataset.d(),
        prior.name,
        cfg.seed,
        output.wall_time_seconds,
        mean_eps.map_or(String::new(), |e| format!(", mean ESS/sec {e:.0}")),
    );
    println!("wrote {}", report_path.display());

    if cmd.traces {
        let p = cmd.output.out_dir.join("traces.csv");
        fs::write(&p, trace_csv(&output, &prep.covariates))?;
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn mean_defined(values: &[Option<f64>]) -> Option<f64> {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    }
}

pub fn build_report(
    prep: &PreparedData,
    prior: &ResolvedPrior,
    cfg: &McmcConfig,
    output: &ChainOutput,
    summary: &SelectionReport,
    command: &str,
    standardize_response: bool,
) -> FitReport {
    let columns = prep
        .covariates
        .iter()
        .enumerate()
        .map(|(j, name)| ColumnReport {
            name: name.clone(),
            mean: prep.stats[j].mean,
            scale: prep.stats[j].scale,
            binary: prep.stats[j].binary,
            incl_prob: summary.incl_prob_hat[j],
            in_median_model: summary.mpm[j],
            alpha_mean: output.alpha_draws.column(j).sum() / output.m as f64,
            iact: summary.iact[j],
            ess: summary.ess[j],
        })
        .collect();
    FitReport {
        config: ConfigEcho {
            command: command.to_string(),
            prior: prior.name.to_string(),
            hyper: prior
                .hyper
                .iter()
                .map(|&(k, v)| (k.to_string(), v))
                .collect(),
            a_omega: prior.spec.omega.a,
            b_omega: prior.spec.omega.b,
            iterations: cfg.iterations,
            burn_in: cfg.burn_in,
            full_model_warmup: cfg.full_model_warmup,
            seed: cfg.seed,
            standardize_response,
        },
        response: prep.response.clone(),
        response_scale: prep.response_scale,
        rows_read: prep.rows_read,
        rows_excluded: prep.rows_excluded,
        rows_used: prep.rows_read - prep.rows_excluded,
        columns,
    }
}

/// Per-iteration traces, one row per stored draw: error variance,
/// inclusion weight, then per covariate the coefficient, the indicator,
/// and the conditional inclusion probability.
fn trace_csv(output: &ChainOutput, names: &[String]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["iteration".to_string(), "sigma2".to_string(), "omega".to_string()];
    header.extend(names.iter().map(|n| format!("alpha_{n}")));
    header.extend(names.iter().map(|n| format!("delta_{n}")));
    header.extend(names.iter().map(|n| format!("p_{n}")));
    w.write_record(&header).expect("csv header");
    for it in 0..output.m {
        let mut row = Vec::with_capacity(header.len());
        row.push(it.to_string());
        row.push(output.sigma2_draws[it].to_string());
        row.push(output.omega_draws[it].to_string());
        for j in 0..output.d {
            row.push(output.alpha_draws[(it, j)].to_string());
        }
        for j in 0..output.d {
            row.push(output.delta_draws[(it, j)].to_string());
        }
        for j in 0..output.d {
            row.push(output.incl_prob[(it, j)].to_string());
        }
        w.write_record(&row).expect("csv row");
    }
    String::from_utf8(w.into_inner().expect("csv buffer")).expect("csv is utf-8")
}
