//! Command-line driver around the spike-and-slab selection engine:
//! CSV ingestion with standardization, MCMC fits with deterministic
//! reports, replicated simulation studies, closed-form probability
//! curves, and chain diagnostics.

pub mod cli;
pub mod curves;
pub mod diagnose;
pub mod fit;
pub mod ingest;
pub mod report;
pub mod simulate;

use anyhow::Result;

pub fn run(cli: cli::Cli) -> Result<()> {
    match &cli.command {
        cli::Command::Fit(cmd) => fit::run(cmd),
        cli::Command::Simulate(cmd) => simulate::run(cmd),
        cli::Command::Analytic(cmd) => curves::run(cmd),
        cli::Command::Diagnose(cmd) => diagnose::run(cmd),
    }
}
