//! Exact posterior over the model space by full enumeration.
//!
//! For small regressor counts every indicator configuration can be scored
//! directly: the weight of a model is its marginal likelihood times the
//! prior model probability with the inclusion weight integrated out,
//! `B(a + d1, b + d - d1) / B(a, b)`. This is the reference the samplers
//! are validated against.

use statrs::function::beta::ln_beta;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::marginal::log_marginal_likelihood;
use crate::prior::{DiracSlab, OmegaPrior};

/// Hard cap on the regressor count; the model space is 2^d.
pub const MAX_ENUMERABLE_D: usize = 20;

/// Exact model-space posterior.
#[derive(Debug, Clone)]
pub struct ExactPosterior {
    /// Exact posterior inclusion probability of each regressor.
    pub incl_prob: Vec<f64>,
    /// Unnormalized log posterior weight of every model, indexed by the
    /// bitmask of included regressors (bit j = regressor j). Models with a
    /// singular or degenerate fit carry negative infinity.
    pub model_log_weight: Vec<f64>,
    /// Log normalizing constant of the weights.
    pub log_norm: f64,
}

impl ExactPosterior {
    /// Normalized posterior probability of one model bitmask.
    pub fn model_probability(&self, mask: usize) -> f64 {
        (self.model_log_weight[mask] - self.log_norm).exp()
    }
}

/// Enumerates all models and returns exact inclusion probabilities.
///
/// Models outside the supported space (singular designs, degenerate fits)
/// get zero weight, matching the samplers, which never enter them.
pub fn enumerate_posterior(
    data: &Dataset,
    slab: DiracSlab,
    omega: &OmegaPrior,
) -> Result<ExactPosterior> {
    let d = data.d();
    if d > MAX_ENUMERABLE_D {
        return Err(Error::ModelSpaceTooLarge {
            d,
            cap: MAX_ENUMERABLE_D,
        });
    }
    let n_models = 1usize << d;
    let ln_prior_norm = ln_beta(omega.a, omega.b);

    let mut model_log_weight = Vec::with_capacity(n_models);
    for mask in 0..n_models {
        let delta: Vec<bool> = (0..d).map(|j| mask >> j & 1 == 1).collect();
        let d1 = mask.count_ones() as f64;
        let lml = match log_marginal_likelihood(data, &delta, slab) {
            Ok(v) => v,
            Err(
                Error::SingularDesign { .. }
                | Error::DegenerateFit { .. }
                | Error::TooFewObservations { .. },
            ) => f64::NEG_INFINITY,
            Err(e) => return Err(e),
        };
        let ln_prior = ln_beta(omega.a + d1, omega.b + d as f64 - d1) - ln_prior_norm;
        model_log_weight.push(lml + ln_prior);
    }

    let log_norm = log_sum_exp(&model_log_weight);
    if !log_norm.is_finite() {
        return Err(Error::DegenerateFit { s_n: f64::NAN });
    }

    let mut incl_prob = Vec::with_capacity(d);
    for j in 0..d {
        let with_j: Vec<f64> = (0..n_models)
            .filter(|mask| mask >> j & 1 == 1)
            .map(|mask| model_log_weight[mask])
            .collect();
        incl_prob.push((log_sum_exp(&with_j) - log_norm).exp());
    }

    Ok(ExactPosterior {
        incl_prob,
        model_log_weight,
        log_norm,
    })
}

/// `log(sum(exp(x)))` guarded against overflow; negative infinity for an
/// all-empty sum.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}
