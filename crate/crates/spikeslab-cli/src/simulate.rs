//! The `simulate` command: replicated benchmark studies.

use std::fmt::Write as _;
use std::fs;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use spikeslab::simulation::{run_study, Scenario, StudyResult};

use crate::cli::{resolve_chain, resolve_prior, Format, PriorName, ScenarioName, SimulateCmd};

fn scenario(name: ScenarioName, replications: usize, seed: u64) -> Scenario {
    match name {
        ScenarioName::Independent => Scenario::independent_design(replications, seed),
        ScenarioName::Correlated => Scenario::correlated_design(replications, seed),
        ScenarioName::Graded => Scenario::graded_design(replications, seed),
    }
}

/// Study output for serialization. Effective draws per second is withheld
/// unless explicitly requested: it is the one quantity that varies across
/// reruns of the same seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyJson {
    pub command: String,
    pub scenario: String,
    pub replications: usize,
    pub seed: u64,
    pub iterations: usize,
    pub burn_in: usize,
    pub full_model_warmup: usize,
    pub rows: Vec<StudyRowJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRowJson {
    pub prior: String,
    pub incl_count: Vec<usize>,
    pub mean_incl_prob: Vec<f64>,
    pub avg_iact: Option<f64>,
    pub iact_skipped: usize,
    pub mean_misclassification: Option<f64>,
    pub failed_replications: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub avg_ess_per_sec: Option<f64>,
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

/// Per-regressor selection table: median-probability-model inclusion
/// counts and mean probabilities, one row per prior and regressor.
fn selection_csv(echo: &str, result: &StudyResult) -> String {
    let mut out = String::from(echo);
    let _ = writeln!(out, "prior,column,incl_count,mean_incl_prob");
    for row in &result.rows {
        for (j, (&count, &prob)) in row.incl_count.iter().zip(&row.mean_incl_prob).enumerate() {
            let _ = writeln!(out, "{},x{},{},{}", row.label, j + 1, count, prob);
        }
    }
    out
}

/// Mixing and misclassification table, one row per prior.
fn mixing_csv(echo: &str, result: &StudyResult, timing: bool) -> String {
    let mut out = String::from(echo);
    let header = if timing {
        "prior,avg_iact,iact_skipped,mean_misclassification,failed,avg_ess_per_sec"
    } else {
        "prior,avg_iact,iact_skipped,mean_misclassification,failed"
    };
    let _ = writeln!(out, "{header}");
    for row in &result.rows {
        let _ = write!(
            out,
            "{},{},{},{},{}",
            row.label,
            fmt_opt(row.avg_iact),
            row.iact_skipped,
            fmt_opt(row.mean_misclassification),
            row.failed_replications.len()
        );
        if timing {
            let _ = write!(out, ",{}", fmt_opt(row.avg_ess_per_sec));
        }
        out.push('\n');
    }
    out
}

pub fn run(cmd: &SimulateCmd) -> Result<()> {
    let cfg = resolve_chain(&cmd.chain)?;
    let scen = scenario(cmd.scenario, cmd.replications, cfg.seed);
    let prior_names = if cmd.priors.is_empty() {
        PriorName::all()
    } else {
        cmd.priors.clone()
    };
    let priors = prior_names
        .iter()
        .map(|&name| {
            let resolved = resolve_prior(name, &cmd.hyper, scen.n)?;
            Ok((resolved.name.to_string(), resolved.spec))
        })
        .collect::<Result<Vec<_>>>()?;

    let result = run_study(&scen, &priors, &cfg)?;

    for row in &result.rows {
        println!(
            "prior {}: avg IACT {}, {} undefined, mean misclassification {}, \
             ESS/sec {}, failed {}",
            row.label,
            row.avg_iact.map_or("-".into(), |v| format!("{v:.1}")),
            row.iact_skipped,
            row.mean_misclassification
                .map_or("-".into(), |v| format!("{v:.3}")),
            row.avg_ess_per_sec.map_or("-".into(), |v| format!("{v:.0}")),
            row.failed_replications.len(),
        );
    }

    fs::create_dir_all(&cmd.output.out_dir)
        .with_context(|| format!("cannot create {}", cmd.output.out_dir.display()))?;
    match cmd.output.format {
        Format::Csv => {
            let mut echo = String::new();
            let _ = writeln!(echo, "# command: simulate");
            let _ = writeln!(echo, "# scenario: {}", cmd.scenario.as_str());
            let _ = writeln!(echo, "# replications: {}", cmd.replications);
            let _ = writeln!(echo, "# seed: {}", cfg.seed);
            let _ = writeln!(echo, "# iterations: {}", cfg.iterations);
            let _ = writeln!(echo, "# burn_in: {}", cfg.burn_in);
            let _ = writeln!(echo, "# full_model_warmup: {}", cfg.full_model_warmup);

            let sel = cmd.output.out_dir.join("study_selection.csv");
            fs::write(&sel, selection_csv(&echo, &result))?;
            let mix = cmd.output.out_dir.join("study_mixing.csv");
            fs::write(&mix, mixing_csv(&echo, &result, cmd.timing))?;
            println!("wrote {}", sel.display());
            println!("wrote {}", mix.display());
        }
        Format::Json => {
            let json = StudyJson {
                command: "simulate".to_string(),
                scenario: cmd.scenario.as_str().to_string(),
                replications: cmd.replications,
                seed: cfg.seed,
                iterations: cfg.iterations,
                burn_in: cfg.burn_in,
                full_model_warmup: cfg.full_model_warmup,
                rows: result
                    .rows
                    .iter()
                    .map(|row| StudyRowJson {
                        prior: row.label.clone(),
                        incl_count: row.incl_count.clone(),
                        mean_incl_prob: row.mean_incl_prob.clone(),
                        avg_iact: row.avg_iact,
                        iact_skipped: row.iact_skipped,
                        mean_misclassification: row.mean_misclassification,
                        failed_replications: row.failed_replications.clone(),
                        avg_ess_per_sec: if cmd.timing { row.avg_ess_per_sec } else { None },
                    })
                    .collect(),
            };
            let path = cmd.output.out_dir.join("study.json");
            let mut text = serde_json::to_string_pretty(&json).expect("study serializes");
            text.push('\n');
            fs::write(&path, text)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
