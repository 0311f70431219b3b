//! Sampler configuration, per-iteration state, and stored output.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Chain-length and seeding configuration shared by both samplers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McmcConfig {
    /// Stored iterations after burn-in.
    pub iterations: usize,
    /// Discarded initial iterations.
    pub burn_in: usize,
    /// Leading burn-in iterations during which every indicator is held at
    /// one, stabilizing the early chain.
    pub full_model_warmup: usize,
    /// RNG seed; identical inputs and seed give bit-identical output.
    pub seed: u64,
    /// Keep full coefficient/variance/indicator traces in addition to the
    /// always-stored inclusion probabilities.
    pub store_traces: bool,
}

impl McmcConfig {
    /// Desk-scale default: 5000 stored draws, 1000 burn-in, the first 500
    /// from the full model.
    pub fn default_lengths(seed: u64) -> Self {
        Self {
            iterations: 5000,
            burn_in: 1000,
            full_model_warmup: 500,
            seed,
            store_traces: false,
        }
    }

    /// Long preset for slowly mixing continuous-spike chains: 50000 stored
    /// draws, 10000 burn-in, 5000 full-model warmup.
    pub fn extended_lengths(seed: u64) -> Self {
        Self {
            iterations: 50_000,
            burn_in: 10_000,
            full_model_warmup: 5_000,
            seed,
            store_traces: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidInput(
                "iterations must be at least 1".to_string(),
            ));
        }
        if self.full_model_warmup > self.burn_in {
            return Err(Error::InvalidInput(format!(
                "full_model_warmup ({}) must not exceed burn_in ({})",
                self.full_model_warmup, self.burn_in
            )));
        }
        Ok(())
    }
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self::default_lengths(0)
    }
}

/// Full parameter state of one MCMC iteration.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub mu: f64,
    pub alpha: DVector<f64>,
    pub delta: Vec<bool>,
    pub omega: f64,
    pub sigma2: f64,
    /// Per-coefficient scale parameters; present only when the prior mixes
    /// over them.
    pub psi: Option<Vec<f64>>,
}

impl ChainState {
    /// Number of included coefficients.
    pub fn d1(&self) -> usize {
        self.delta.iter().filter(|&&b| b).count()
    }
}

/// Stored draws of one chain.
///
/// Inclusion probabilities are the per-iteration conditional probabilities
/// of the indicator update (Rao-Blackwellized), not raw indicator draws;
/// their column means estimate the posterior inclusion probabilities. Raw
/// indicator frequencies are kept in `delta_mean` for cross-checking. When
/// traces were not requested the trace members are empty (zero rows).
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOutput {
    /// Stored iterations.
    pub m: usize,
    /// Number of regressors.
    pub d: usize,
    /// m-by-d matrix of conditional inclusion probabilities.
    pub incl_prob: DMatrix<f64>,
    /// m-by-d indicator draws (trace).
    pub delta_draws: DMatrix<u8>,
    /// m-by-d coefficient draws (trace).
    pub alpha_draws: DMatrix<f64>,
    /// Error-variance draws (trace).
    pub sigma2_draws: DVector<f64>,
    /// Inclusion-weight draws (trace).
    pub omega_draws: DVector<f64>,
    /// Mean of the raw indicator draws per regressor.
    pub delta_mean: Vec<f64>,
    /// Wall-clock seconds spent in the post-burn-in sampling loop.
    pub wall_time_seconds: f64,
}

impl ChainOutput {
    /// Column means of the stored conditional inclusion probabilities: the
    /// estimated posterior inclusion probabilities.
    pub fn incl_prob_mean(&self) -> Vec<f64> {
        (0..self.d)
            .map(|j| self.incl_prob.column(j).sum() / self.m as f64)
            .collect()
    }

    /// One regressor's stored probability series.
    pub fn incl_prob_series(&self, j: usize) -> Vec<f64> {
        self.incl_prob.column(j).iter().copied().collect()
    }
}
