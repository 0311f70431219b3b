//! The `diagnose` command: mixing diagnostics for trace columns.

use std::fs;

use anyhow::{Context, Result};

use spikeslab::diagnostics::{effective_sample_size, iact_initial_monotone};

use crate::cli::{DiagnoseCmd, Format};
use crate::ingest::read_columns;
use crate::report::{DiagnoseReport, DiagnoseRow};

pub fn run(cmd: &DiagnoseCmd) -> Result<()> {
    let table = read_columns(&cmd.data, &cmd.columns)?;
    if table.rows_excluded > 0 {
        anyhow::bail!(
            "{} rows have missing values; traces must be complete",
            table.rows_excluded
        );
    }

    let mut rows = Vec::with_capacity(table.names.len());
    for (name, series) in table.names.iter().zip(&table.data) {
        let iact = iact_initial_monotone(series)
            .with_context(|| format!("column {name:?}"))?;
        let ess = effective_sample_size(series, series.len())
            .with_context(|| format!("column {name:?}"))?;
        rows.push(DiagnoseRow {
            name: name.clone(),
            draws: series.len(),
            iact,
            ess,
        });
    }
    let report = DiagnoseReport {
        command: "diagnose".to_string(),
        rows,
    };

    for row in &report.rows {
        println!(
            "{}: {} draws, iact {}, ess {}",
            row.name,
            row.draws,
            row.iact.map_or("-".into(), |v| format!("{v:.2}")),
            row.ess.map_or("-".into(), |v| format!("{v:.1}")),
        );
    }

    fs::create_dir_all(&cmd.output.out_dir)
        .with_context(|| format!("cannot create {}", cmd.output.out_dir.display()))?;
    let path = match cmd.output.format {
        Format::Csv => {
            let p = cmd.output.out_dir.join("diagnose.csv");
            fs::write(&p, report.to_csv())?;
            p
        }
        Format::Json => {
            let p = cmd.output.out_dir.join("diagnose.json");
            fs::write(&p, report.to_json())?;
            p
        }
    };
    println!("wrote {}", path.display());
    Ok(())
}
