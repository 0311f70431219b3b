//! Data generators and the replication harness for the benchmark designs.
//!
//! Regressor rows are drawn from a zero-mean normal law with either an
//! identity covariance or the autoregressive pattern `C_jk = rho^|j-k|`;
//! the response adds a known intercept and Gaussian noise. Covariates are
//! generated from the stated law and not rescaled afterwards; effect sizes
//! are interpreted on that scale.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::chain::McmcConfig;
use crate::data::Dataset;
use crate::diagnostics::{mean_defined, summarize, SelectionReport, Truth};
use crate::error::{Error, Result};
use crate::prior::PriorSpec;
use crate::samplers::{derive_seed, run_mcmc};

/// Regressor covariance structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Correlation {
    Independent,
    /// `C_jk = rho^|j-k|`.
    Ar(f64),
}

/// One experimental design: data-generating law plus replication count.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub n: usize,
    pub d: usize,
    /// Effect magnitudes, assigned to columns through `effect_order`.
    pub effects: Vec<f64>,
    /// `effects[k]` lands on column `effect_order[k]`.
    pub effect_order: Vec<usize>,
    pub mu_true: f64,
    pub sigma2_true: f64,
    pub corr: Correlation,
    /// Columns whose selection is scored (the weak and zero effects);
    /// strong effects are excluded from misclassification and mixing
    /// averages.
    pub weak_zero: Vec<usize>,
    pub replications: usize,
    pub seed: u64,
}

impl Scenario {
    /// Benchmark design with independent regressors: N = 40, nine columns,
    /// three strong (2), three weak (0.2), three zero effects in column
    /// order.
    pub fn independent_design(replications: usize, seed: u64) -> Self {
        Self {
            n: 40,
            d: 9,
            effects: vec![2.0, 2.0, 2.0, 0.2, 0.2, 0.2, 0.0, 0.0, 0.0],
            effect_order: (0..9).collect(),
            mu_true: 1.0,
            sigma2_true: 1.0,
            corr: Correlation::Independent,
            weak_zero: (3..9).collect(),
            replications,
            seed,
        }
    }

    /// Benchmark design with autoregressive correlation 0.8: strong effects
    /// on columns 1, 2, 4; weak on 5, 8, 9; zeros on 3, 6, 7 (1-based).
    pub fn correlated_design(replications: usize, seed: u64) -> Self {
        Self {
            n: 40,
            d: 9,
            effects: vec![2.0, 2.0, 2.0, 0.2, 0.2, 0.2, 0.0, 0.0, 0.0],
            effect_order: vec![0, 1, 3, 4, 7, 8, 2, 5, 6],
            mu_true: 1.0,
            sigma2_true: 1.0,
            corr: Correlation::Ar(0.8),
            weak_zero: vec![2, 4, 5, 6, 7, 8],
            replications,
            seed,
        }
    }

    /// Graded-effects design: N = 200, 21 independent standard normal
    /// regressors with effects 0, 0.02, ..., 0.4.
    pub fn graded_design(replications: usize, seed: u64) -> Self {
        Self {
            n: 200,
            d: 21,
            effects: (0..21).map(|k| 0.02 * k as f64).collect(),
            effect_order: (0..21).collect(),
            mu_true: 1.0,
            sigma2_true: 1.0,
            corr: Correlation::Independent,
            weak_zero: (0..21).collect(),
            replications,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.effects.len() != self.d {
            return Err(Error::InvalidInput(format!(
                "effects length {} does not match d = {}",
                self.effects.len(),
                self.d
            )));
        }
        let mut seen = vec![false; self.d];
        for &col in &self.effect_order {
            if col >= self.d || seen[col] {
                return Err(Error::InvalidInput(
                    "effect_order must be a permutation of the column indices".to_string(),
                ));
            }
            seen[col] = true;
        }
        if self.effect_order.len() != self.d {
            return Err(Error::InvalidInput(
                "effect_order must be a permutation of the column indices".to_string(),
            ));
        }
        if let Correlation::Ar(rho) = self.corr {
            if !(0.0..1.0).contains(&rho) {
                return Err(Error::InvalidHyperparameter {
                    name: "rho",
                    value: rho,
                    constraint: "must lie in [0, 1)",
                });
            }
        }
        if !(self.sigma2_true > 0.0) {
            return Err(Error::InvalidHyperparameter {
                name: "sigma2_true",
                value: self.sigma2_true,
                constraint: "must be positive",
            });
        }
        if self.weak_zero.iter().any(|&j| j >= self.d) {
            return Err(Error::InvalidInput(
                "weak_zero indices must address existing columns".to_string(),
            ));
        }
        Ok(())
    }

    /// True coefficient of each column.
    pub fn column_coefficients(&self) -> Vec<f64> {
        let mut coef = vec![0.0; self.d];
        for (k, &col) in self.effect_order.iter().enumerate() {
            coef[col] = self.effects[k];
        }
        coef
    }

    /// Selection truth: nonzero pattern plus the assessed subset.
    pub fn truth(&self) -> Truth {
        Truth {
            nonzero: self.column_coefficients().iter().map(|&a| a != 0.0).collect(),
            assess: Some(self.weak_zero.clone()),
        }
    }

    /// Draws one replication's dataset. Deterministic in (seed,
    /// replication_index); the covariates are redrawn for every
    /// replication.
    pub fn generate_dataset(&self, replication_index: usize) -> Result<Dataset> {
        self.validate()?;
        let mut rng =
            ChaCha8Rng::seed_from_u64(derive_seed(self.seed, replication_index as u64));
        let chol_l = match self.corr {
            Correlation::Independent => None,
            Correlation::Ar(rho) => {
                let c = DMatrix::from_fn(self.d, self.d, |j, k| {
                    rho.powi((j as i32 - k as i32).abs())
                });
                Some(
                    Cholesky::new(c)
                        .expect("autoregressive covariance is positive definite for |rho| < 1")
                        .unpack(),
                )
            }
        };

        let mut x = DMatrix::zeros(self.n, self.d);
        let mut row = DVector::zeros(self.d);
        for i in 0..self.n {
            for v in row.iter_mut() {
                *v = rng.sample::<f64, _>(StandardNormal);
            }
            match &chol_l {
                None => x.set_row(i, &row.transpose()),
                Some(l) => x.set_row(i, &(l * &row).transpose()),
            }
        }

        let coef = DVector::from_vec(self.column_coefficients());
        let noise_sd = self.sigma2_true.sqrt();
        let xb = &x * &coef;
        let y: Vec<f64> = (0..self.n)
            .map(|i| self.mu_true + xb[i] + noise_sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Dataset::load(&y, &x, true)
    }
}

/// Aggregated results of one prior across the replications.
#[derive(Debug, Clone)]
pub struct StudyRow {
    pub label: String,
    /// Replications in which each regressor entered the median probability
    /// model.
    pub incl_count: Vec<usize>,
    /// Mean estimated inclusion probability per regressor.
    pub mean_incl_prob: Vec<f64>,
    /// Inefficiency factor averaged over the assessed regressors and
    /// replications, skipping undefined values.
    pub avg_iact: Option<f64>,
    /// Count of undefined inefficiency factors skipped in the average.
    pub iact_skipped: usize,
    /// Effective draws per second averaged the same way. Timing-based:
    /// the one study quantity that is not reproducible across runs.
    pub avg_ess_per_sec: Option<f64>,
    /// Mean misclassification rate over the assessed regressors.
    pub mean_misclassification: Option<f64>,
    /// Replication indices whose chain failed; excluded from aggregates.
    pub failed_replications: Vec<usize>,
}

/// Study output: one row per prior.
#[derive(Debug, Clone)]
pub struct StudyResult {
    pub rows: Vec<StudyRow>,
    pub replications: usize,
}

/// Runs every prior over every replication and aggregates the per-chain
/// selection reports.
///
/// All priors see the same data per replication. Chains get seeds derived
/// from (config seed, prior index, replication index), so any subset of a
/// study reproduces exactly; replications run in parallel and aggregation
/// is order-independent.
pub fn run_study(
    scenario: &Scenario,
    priors: &[(String, PriorSpec)],
    cfg: &McmcConfig,
) -> Result<StudyResult> {
    scenario.validate()?;
    cfg.validate()?;
    for (_, p) in priors {
        p.validate()?;
    }
    if scenario.replications == 0 {
        return Ok(StudyResult {
            rows: Vec::new(),
            replications: 0,
        });
    }

    let truth = scenario.truth();
    let datasets: Vec<Dataset> = (0..scenario.replications)
        .into_par_iter()
        .map(|rep| scenario.generate_dataset(rep))
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(priors.len());
    for (prior_idx, (label, prior)) in priors.iter().enumerate() {
        let prior_seed = derive_seed(cfg.seed, 0x5052_4900 + prior_idx as u64);
        let reports: Vec<std::result::Result<SelectionReport, Error>> = datasets
            .par_iter()
            .enumerate()
            .map(|(rep, data)| {
                let mut chain_cfg = *cfg;
                chain_cfg.seed = derive_seed(prior_seed, rep as u64);
                run_mcmc(data, prior, &chain_cfg).map(|out| summarize(&out, Some(&truth)))
            })
            .collect();

        let mut incl_count = vec![0usize; scenario.d];
        let mut prob_sum = vec![0.0f64; scenario.d];
        let mut iacts = Vec::new();
        let mut ess_rates = Vec::new();
        let mut misclass = Vec::new();
        let mut failed = Vec::new();
        let mut ok_count = 0usize;
        for (rep, report) in reports.iter().enumerate() {
            match report {
                Err(_) => failed.push(rep),
                Ok(r) => {
                    ok_count += 1;
                    for j in 0..scenario.d {
                        if r.mpm[j] {
                            incl_count[j] += 1;
                        }
                        prob_sum[j] += r.incl_prob_hat[j];
                    }
                    for &j in &scenario.weak_zero {
                        iacts.push(r.iact[j]);
                        ess_rates.push(r.ess_per_sec[j]);
                    }
                    misclass.push(r.misclassification_rate.expect("truth supplied"));
                }
            }
        }

        let (avg_iact, iact_skipped) = mean_defined(&iacts);
        let (avg_ess_per_sec, _) = mean_defined(&ess_rates);
        let mean_misclassification = if misclass.is_empty() {
            None
        } else {
            Some(misclass.iter().sum::<f64>() / misclass.len() as f64)
        };
        rows.push(StudyRow {
            label: label.clone(),
            incl_count,
            mean_incl_prob: prob_sum
                .iter()
                .map(|s| if ok_count > 0 { s / ok_count as f64 } else { 0.0 })
                .collect(),
            avg_iact,
            iact_skipped,
            avg_ess_per_sec,
            mean_misclassification,
            failed_replications: failed,
        });
    }

    Ok(StudyResult {
        rows,
        replications: scenario.replications,
    })
}
