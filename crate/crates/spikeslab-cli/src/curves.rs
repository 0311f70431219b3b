//! The `analytic` command: closed-form inclusion probability curves and
//! the rerun-based inclusion path.

use std::fmt::Write as _;
use std::fs;

use anyhow::{bail, Context, Result};

use spikeslab::analytic::{
    h_correlated_pair, h_orthogonal, inclusion_probability_from_h,
    inclusion_probability_integrated_omega, CorrelatedPairSetting, OrthogonalSetting,
};
use spikeslab::prior::{ContinuousSpike, DiracSlab, OmegaPrior, PriorFamily, PriorSpec};
use spikeslab::samplers::run_mcmc;

use crate::cli::{require_dirac, resolve_chain, resolve_prior, AnalyticCmd, CurveKind, SweepVar};
use crate::fit::prepare;

/// How the prior inclusion weight enters the curve: pinned, or averaged
/// over its Beta prior.
enum OmegaMode {
    Fixed(f64),
    Integrated { a: f64, b: f64 },
}

impl OmegaMode {
    fn probability(&self, h: f64) -> f64 {
        match *self {
            OmegaMode::Fixed(w) => inclusion_probability_from_h(h, w),
            OmegaMode::Integrated { a, b } => inclusion_probability_integrated_omega(h, a, b),
        }
    }

    fn describe(&self) -> String {
        match *self {
            OmegaMode::Fixed(w) => format!("fixed {w}"),
            OmegaMode::Integrated { a, b } => format!("integrated Beta({a}, {b})"),
        }
    }
}

fn omega_mode(cmd: &AnalyticCmd) -> Result<OmegaMode> {
    match cmd.omega {
        Some(w) => {
            if !(w > 0.0 && w < 1.0) {
                bail!("omega: must lie strictly in (0, 1), got {w}");
            }
            Ok(OmegaMode::Fixed(w))
        }
        None => Ok(OmegaMode::Integrated {
            a: cmd.hyper.a_omega,
            b: cmd.hyper.b_omega,
        }),
    }
}

/// Evenly spaced grid; a single point sits at the start.
fn grid(min: f64, max: f64, points: usize) -> Result<Vec<f64>> {
    if points == 0 {
        bail!("grid-points: must be at least 1");
    }
    if max < min {
        bail!("grid: max {max} is below min {min}");
    }
    if points == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (points - 1) as f64;
    Ok((0..points).map(|i| min + step * i as f64).collect())
}

pub fn run(cmd: &AnalyticCmd) -> Result<()> {
    fs::create_dir_all(&cmd.output.out_dir)
        .with_context(|| format!("cannot create {}", cmd.output.out_dir.display()))?;
    match cmd.kind {
        CurveKind::Orthogonal => orthogonal(cmd),
        CurveKind::CorrelatedPair => correlated_pair(cmd),
        CurveKind::InclusionPath => inclusion_path(cmd),
    }
}

fn hyper_echo(prior: &crate::cli::ResolvedPrior) -> String {
    prior
        .hyper
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Single-regressor curve over the measured coefficient.
fn orthogonal(cmd: &AnalyticCmd) -> Result<()> {
    let prior = resolve_prior(cmd.prior, &cmd.hyper, cmd.n)?;
    let slab = require_dirac(&prior)?;
    let omega = omega_mode(cmd)?;
    let xs = grid(
        cmd.grid_min.unwrap_or(0.0),
        cmd.grid_max.unwrap_or(1.5),
        cmd.grid_points,
    )?;

    let mut out = String::new();
    let _ = writeln!(out, "# command: analytic");
    let _ = writeln!(out, "# kind: orthogonal");
    let _ = writeln!(out, "# prior: {}", prior.name);
    let _ = writeln!(out, "# hyper: {}", hyper_echo(&prior));
    let _ = writeln!(out, "# n: {}", cmd.n);
    let _ = writeln!(out, "# sigma2: {}", cmd.sigma2);
    let _ = writeln!(out, "# s2: {}", cmd.s2);
    let _ = writeln!(out, "# omega: {}", omega.describe());
    let _ = writeln!(out, "alpha_hat,incl_prob");
    for &alpha_hat in &xs {
        // The setting's own omega field is unused by h; any interior value
        // satisfies validation.
        let setting = OrthogonalSetting::new(alpha_hat, cmd.s2, cmd.n, cmd.sigma2, 0.5)?;
        let h = h_orthogonal(&setting, slab);
        let _ = writeln!(out, "{},{}", alpha_hat, omega.probability(h));
    }

    let path = cmd.output.out_dir.join("curve_orthogonal.csv");
    fs::write(&path, out)?;
    println!("wrote {} ({} rows)", path.display(), xs.len());
    Ok(())
}

/// Second-regressor curve with the first already included. Sweeping the
/// coefficient follows the closed-form figure; sweeping the correlation
/// shows the penalization effect at a fixed signal. The raw response
/// correlation is backed out from the requested coefficient so the inputs
/// stay mutually consistent:
/// `r_y2 = alpha2 * (1 - r12^2) / s_y + r12 * r_y1`.
fn correlated_pair(cmd: &AnalyticCmd) -> Result<()> {
    let prior = resolve_prior(cmd.prior, &cmd.hyper, cmd.n)?;
    let slab = require_dirac(&prior)?;
    let omega = omega_mode(cmd)?;
    let (xs, x_name) = match cmd.sweep {
        SweepVar::Alpha2 => (
            grid(
                cmd.grid_min.unwrap_or(-1.2),
                cmd.grid_max.unwrap_or(1.2),
                cmd.grid_points,
            )?,
            "alpha_hat2",
        ),
        SweepVar::R12 => (
            grid(
                cmd.grid_min.unwrap_or(0.0),
                cmd.grid_max.unwrap_or(0.9),
                cmd.grid_points,
            )?,
            "r12",
        ),
    };

    let mut out = String::new();
    let _ = writeln!(out, "# command: analytic");
    let _ = writeln!(out, "# kind: correlated-pair");
    let _ = writeln!(out, "# prior: {}", prior.name);
    let _ = writeln!(out, "# hyper: {}", hyper_echo(&prior));
    let _ = writeln!(out, "# n: {}", cmd.n);
    let _ = writeln!(out, "# sigma2: {}", cmd.sigma2);
    let _ = writeln!(out, "# r_y1: {}", cmd.r_y1);
    let _ = writeln!(out, "# s_y: {}", cmd.s_y);
    match cmd.sweep {
        SweepVar::Alpha2 => {
            let _ = writeln!(out, "# r12: {}", cmd.r12);
        }
        SweepVar::R12 => {
            let _ = writeln!(out, "# alpha2: {}", cmd.alpha2);
        }
    }
    let _ = writeln!(out, "# omega: {}", omega.describe());
    let _ = writeln!(out, "{x_name},incl_prob");
    for &x in &xs {
        let (alpha2, r12) = match cmd.sweep {
            SweepVar::Alpha2 => (x, cmd.r12),
            SweepVar::R12 => (cmd.alpha2, x),
        };
        let r_y2 = alpha2 * (1.0 - r12 * r12) / cmd.s_y + r12 * cmd.r_y1;
        let setting =
            CorrelatedPairSetting::new(alpha2, r12, r_y2, cmd.s_y, cmd.n, cmd.sigma2, 0.5)?;
        let h = h_correlated_pair(&setting, slab);
        let _ = writeln!(out, "{},{}", x, omega.probability(h));
    }

    let path = cmd.output.out_dir.join("curve_correlated_pair.csv");
    fs::write(&path, out)?;
    println!("wrote {} ({} rows)", path.display(), xs.len());
    Ok(())
}

/// Matches every family's slab variance to the path scale; at scale 1
/// each family sits at its default.
fn scaled_family(base: PriorFamily, scale: f64, n: usize) -> Result<PriorFamily> {
    if scale <= 0.0 {
        bail!("path-scales: must be positive, got {scale}");
    }
    Ok(match base {
        PriorFamily::Dirac(DiracSlab::Independence { .. }) => {
            PriorFamily::Dirac(DiracSlab::Independence { c: scale })
        }
        PriorFamily::Dirac(DiracSlab::GPrior { .. }) => {
            PriorFamily::Dirac(DiracSlab::GPrior { g: n as f64 * scale })
        }
        PriorFamily::Dirac(DiracSlab::Fractional { .. }) => PriorFamily::Dirac(DiracSlab::Fractional {
            b: 1.0 / (n as f64 * scale),
        }),
        PriorFamily::Continuous(ContinuousSpike::Ssvs { r, .. }) => {
            PriorFamily::Continuous(ContinuousSpike::Ssvs { r, v: scale })
        }
        PriorFamily::Continuous(ContinuousSpike::Nmig { r, nu, .. }) => {
            if nu <= 1.0 {
                bail!("nu: inclusion-path scaling needs nu > 1, got {nu}");
            }
            // Prior mean of the mixing scale equals the path value.
            PriorFamily::Continuous(ContinuousSpike::Nmig {
                r,
                nu,
                q: scale * (nu - 1.0),
            })
        }
    })
}

/// Reruns the fit at each slab scale with identical seeds and emits the
/// per-covariate probability paths.
fn inclusion_path(cmd: &AnalyticCmd) -> Result<()> {
    let data = cmd
        .data
        .as_deref()
        .context("inclusion-path needs --data")?;
    let response = cmd
        .response
        .as_deref()
        .context("inclusion-path needs --response")?;
    if cmd.path_scales.is_empty() {
        bail!("path-scales: must not be empty");
    }

    let prep = prepare(data, response, &cmd.covariates, false)?;
    let n = prep.dataset.n();
    let base = resolve_prior(cmd.prior, &cmd.hyper, n)?;
    let cfg = resolve_chain(&cmd.chain)?;

    let mut out = String::new();
    let _ = writeln!(out, "# command: analytic");
    let _ = writeln!(out, "# kind: inclusion-path");
    let _ = writeln!(out, "# prior: {}", base.name);
    let _ = writeln!(out, "# a_omega: {}", base.spec.omega.a);
    let _ = writeln!(out, "# b_omega: {}", base.spec.omega.b);
    let _ = writeln!(out, "# iterations: {}", cfg.iterations);
    let _ = writeln!(out, "# burn_in: {}", cfg.burn_in);
    let _ = writeln!(out, "# full_model_warmup: {}", cfg.full_model_warmup);
    let _ = writeln!(out, "# seed: {}", cfg.seed);
    let _ = writeln!(out, "scale,column,incl_prob");
    for &scale in &cmd.path_scales {
        let family = scaled_family(base.spec.family, scale, n)?;
        let spec = PriorSpec::new(
            family,
            OmegaPrior {
                a: cmd.hyper.a_omega,
                b: cmd.hyper.b_omega,
            },
        )?;
        let probs = run_mcmc(&prep.dataset, &spec, &cfg)?.incl_prob_mean();
        for (name, p) in prep.covariates.iter().zip(&probs) {
            let _ = writeln!(out, "{},{},{}", scale, name, p);
        }
    }

    let path = cmd.output.out_dir.join("inclusion_path.csv");
    fs::write(&path, out)?;
    println!(
        "wrote {} ({} scales x {} covariates)",
        path.display(),
        cmd.path_scales.len(),
        prep.covariates.len()
    );
    Ok(())
}
