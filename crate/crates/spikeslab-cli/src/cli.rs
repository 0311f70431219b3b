//! Argument definitions and resolution into library types.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use spikeslab::prior::{ContinuousSpike, DiracSlab, OmegaPrior, PriorFamily, PriorSpec};
use spikeslab::McmcConfig;

/// Environment variable consulted for the seed when `--seed` is absent.
pub const SEED_ENV: &str = "SPIKESLAB_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "spikeslab",
    version,
    about = "Bayesian variable selection for linear regression with spike-and-slab priors",
    long_about = "Fits spike-and-slab selection priors to CSV data by MCMC, runs \
                  reproducible simulation studies, evaluates closed-form inclusion \
                  probability curves, and scores chain mixing.\n\n\
                  The seed defaults to the SPIKESLAB_SEED environment variable, then \
                  to 0; an explicit --seed always wins."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one selection prior to a CSV dataset and write a report.
    Fit(FitCmd),
    /// Run a replicated simulation study on a benchmark design.
    Simulate(SimulateCmd),
    /// Emit closed-form or rerun-based inclusion probability curves.
    Analytic(AnalyticCmd),
    /// Score the columns of a trace CSV with mixing diagnostics.
    Diagnose(DiagnoseCmd),
}

#[derive(Debug, Args)]
pub struct FitCmd {
    /// CSV data file with a header row.
    #[arg(long)]
    pub data: PathBuf,

    /// Response column name.
    #[arg(long)]
    pub response: String,

    /// Comma-separated covariate column names; default: every other column.
    #[arg(long, value_delimiter = ',')]
    pub covariates: Vec<String>,

    /// Scale the response by the full-model residual standard deviation.
    #[arg(long)]
    pub standardize_response: bool,

    /// Also write per-iteration traces (traces.csv).
    #[arg(long)]
    pub traces: bool,

    /// Prior family.
    #[arg(long, value_enum)]
    pub prior: PriorName,

    #[command(flatten)]
    pub hyper: HyperArgs,

    #[command(flatten)]
    pub chain: ChainArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateCmd {
    /// Benchmark design.
    #[arg(long, value_enum)]
    pub scenario: ScenarioName,

    /// Number of replicated datasets.
    #[arg(long, default_value_t = 100)]
    pub replications: usize,

    /// Comma-separated prior families to compare; default: all five.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub priors: Vec<PriorName>,

    /// Include effective draws per second in the output files. Timing is
    /// not reproducible, so it is withheld by default to keep reruns
    /// byte-identical.
    #[arg(long)]
    pub timing: bool,

    #[command(flatten)]
    pub hyper: HyperArgs,

    #[command(flatten)]
    pub chain: ChainArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AnalyticCmd {
    /// Curve kind.
    #[arg(long, value_enum)]
    pub kind: CurveKind,

    /// Prior family. Closed-form curves exist for the point-mass family
    /// only; inclusion-path accepts all five.
    #[arg(long, value_enum)]
    pub prior: PriorName,

    /// Grid start; default depends on the curve kind.
    #[arg(long)]
    pub grid_min: Option<f64>,

    /// Grid end; default depends on the curve kind.
    #[arg(long)]
    pub grid_max: Option<f64>,

    /// Number of evenly spaced grid points.
    #[arg(long, default_value_t = 61)]
    pub grid_points: usize,

    /// Sample size the closed forms condition on.
    #[arg(long, default_value_t = 40)]
    pub n: usize,

    /// Error variance the closed forms condition on.
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,

    /// Sample variance of the regressor (orthogonal curve only).
    #[arg(long, default_value_t = 1.0)]
    pub s2: f64,

    /// Fixed inclusion weight; when absent the weight is integrated over
    /// its Beta(a-omega, b-omega) prior.
    #[arg(long)]
    pub omega: Option<f64>,

    /// Correlated-pair curve: which variable the grid sweeps.
    #[arg(long, value_enum, default_value = "alpha2")]
    pub sweep: SweepVar,

    /// Correlated-pair curve: regressor correlation (fixed when sweeping
    /// alpha2).
    #[arg(long, default_value_t = 0.5)]
    pub r12: f64,

    /// Correlated-pair curve: second coefficient (fixed when sweeping r12).
    #[arg(long, default_value_t = 0.5)]
    pub alpha2: f64,

    /// Correlated-pair curve: response correlation with the included
    /// regressor.
    #[arg(long, default_value_t = 0.9)]
    pub r_y1: f64,

    /// Correlated-pair curve: response standard deviation.
    #[arg(long, default_value_t = 2.0)]
    pub s_y: f64,

    /// Inclusion-path: CSV data file.
    #[arg(long)]
    pub data: Option<PathBuf>,

    /// Inclusion-path: response column name.
    #[arg(long)]
    pub response: Option<String>,

    /// Inclusion-path: covariate column names; default: every other column.
    #[arg(long, value_delimiter = ',')]
    pub covariates: Vec<String>,

    /// Inclusion-path: slab scales to rerun at. Every family is matched so
    /// its slab variance equals the scale; at scale 1 each family sits at
    /// its default.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 2.5, 5.0, 10.0])]
    pub path_scales: Vec<f64>,

    #[command(flatten)]
    pub hyper: HyperArgs,

    #[command(flatten)]
    pub chain: ChainArgs,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DiagnoseCmd {
    /// CSV file of chain traces, one column per series.
    #[arg(long)]
    pub data: PathBuf,

    /// Comma-separated column names to score; default: every column.
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,

    #[command(flatten)]
    pub output: OutputArgs,
}

/// Hyperparameters; only the ones for the selected family are read.
/// Data-dependent defaults (g = N, b = 1/N) resolve after ingestion.
#[derive(Debug, Args)]
pub struct HyperArgs {
    /// Independence-slab variance (default 1).
    #[arg(long)]
    pub c: Option<f64>,

    /// Zellner-slab scale (default: the sample size).
    #[arg(long)]
    pub g: Option<f64>,

    /// Fractional-slab likelihood fraction (default: 1/N).
    #[arg(long)]
    pub b: Option<f64>,

    /// Slab variance of the normal spike/slab pair (default 1).
    #[arg(long = "V")]
    pub v: Option<f64>,

    /// Spike-to-slab variance ratio of the continuous spikes (default 1e-4).
    #[arg(long)]
    pub r: Option<f64>,

    /// Scale-mixture shape (default 5).
    #[arg(long)]
    pub nu: Option<f64>,

    /// Scale-mixture rate (default 4).
    #[arg(long = "Q")]
    pub q: Option<f64>,

    /// Beta shape a of the inclusion-weight prior.
    #[arg(long, default_value_t = 1.0)]
    pub a_omega: f64,

    /// Beta shape b of the inclusion-weight prior.
    #[arg(long, default_value_t = 1.0)]
    pub b_omega: f64,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    /// Stored draws after burn-in; overrides the preset.
    #[arg(long)]
    pub iterations: Option<usize>,

    /// Discarded initial draws; overrides the preset.
    #[arg(long = "burnin")]
    pub burn_in: Option<usize>,

    /// Leading burn-in draws with every indicator held at one.
    #[arg(long)]
    pub warmup_full: Option<usize>,

    /// Chain-length preset; continuous spikes usually need `extended`.
    #[arg(long, value_enum, default_value = "standard")]
    pub preset: Preset,

    /// RNG seed; default: SPIKESLAB_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Directory for result files; created if absent.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,

    /// Report format. Curve output is always CSV.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriorName {
    Ssvs,
    Nmig,
    DiracI,
    DiracG,
    DiracF,
}

impl PriorName {
    pub fn as_str(self) -> &'static str {
        match self {
            PriorName::Ssvs => "ssvs",
            PriorName::Nmig => "nmig",
            PriorName::DiracI => "dirac-i",
            PriorName::DiracG => "dirac-g",
            PriorName::DiracF => "dirac-f",
        }
    }

    pub fn all() -> Vec<PriorName> {
        vec![
            PriorName::Ssvs,
            PriorName::Nmig,
            PriorName::DiracI,
            PriorName::DiracG,
            PriorName::DiracF,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioName {
    Independent,
    Correlated,
    Graded,
}

impl ScenarioName {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::Independent => "independent",
            ScenarioName::Correlated => "correlated",
            ScenarioName::Graded => "graded",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    Orthogonal,
    CorrelatedPair,
    InclusionPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    Alpha2,
    R12,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Standard,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Seed precedence: flag, then environment, then 0.
pub fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(raw) => raw
            .trim()
            .parse()
            .with_context(|| format!("{SEED_ENV} must be an unsigned integer, got {raw:?}")),
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(err) => Err(err).context(SEED_ENV),
    }
}

/// Builds the chain configuration from preset, overrides, and seed.
pub fn resolve_chain(args: &ChainArgs) -> Result<McmcConfig> {
    let base = match args.preset {
        Preset::Standard => McmcConfig::default_lengths(0),
        Preset::Extended => McmcConfig::extended_lengths(0),
    };
    let cfg = McmcConfig {
        iterations: args.iterations.unwrap_or(base.iterations),
        burn_in: args.burn_in.unwrap_or(base.burn_in),
        full_model_warmup: args.warmup_full.unwrap_or(base.full_model_warmup),
        seed: resolve_seed(args.seed)?,
        store_traces: false,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Resolved prior plus the hyperparameters actually in effect, for the
/// config echo.
#[derive(Debug)]
pub struct ResolvedPrior {
    pub name: &'static str,
    pub spec: PriorSpec,
    pub hyper: Vec<(&'static str, f64)>,
}

/// Fills family defaults (g = N, b = 1/N need the sample size) and
/// validates through the library.
pub fn resolve_prior(name: PriorName, args: &HyperArgs, n: usize) -> Result<ResolvedPrior> {
    let omega = OmegaPrior {
        a: args.a_omega,
        b: args.b_omega,
    };
    let (family, hyper) = match name {
        PriorName::Ssvs => {
            let r = args.r.unwrap_or(1e-4);
            let v = args.v.unwrap_or(1.0);
            (
                PriorFamily::Continuous(ContinuousSpike::Ssvs { r, v }),
                vec![("r", r), ("V", v)],
            )
        }
        PriorName::Nmig => {
            let r = args.r.unwrap_or(1e-4);
            let nu = args.nu.unwrap_or(5.0);
            let q = args.q.unwrap_or(4.0);
            (
                PriorFamily::Continuous(ContinuousSpike::Nmig { r, nu, q }),
                vec![("r", r), ("nu", nu), ("Q", q)],
            )
        }
        PriorName::DiracI => {
            let c = args.c.unwrap_or(1.0);
            (
                PriorFamily::Dirac(DiracSlab::Independence { c }),
                vec![("c", c)],
            )
        }
        PriorName::DiracG => {
            let g = args.g.unwrap_or(n as f64);
            (PriorFamily::Dirac(DiracSlab::GPrior { g }), vec![("g", g)])
        }
        PriorName::DiracF => {
            let b = args.b.unwrap_or(1.0 / n as f64);
            (
                PriorFamily::Dirac(DiracSlab::Fractional { b }),
                vec![("b", b)],
            )
        }
    };
    let spec = PriorSpec::new(family, omega)?;
    Ok(ResolvedPrior {
        name: name.as_str(),
        spec,
        hyper,
    })
}

/// Extracts the point-mass slab, the only family with closed-form curves.
pub fn require_dirac(prior: &ResolvedPrior) -> Result<DiracSlab> {
    match prior.spec.family {
        PriorFamily::Dirac(slab) => Ok(slab),
        PriorFamily::Continuous(_) => bail!(
            "prior: closed-form curves exist only for the point-mass family \
             (dirac-i, dirac-g, dirac-f), got {}",
            prior.name
        ),
    }
}
