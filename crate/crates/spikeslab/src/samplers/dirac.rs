//! Marginalized sampler for the point-mass spike priors.
//!
//! The coefficients and error variance are integrated out of the indicator
//! update, so each indicator is drawn from its conditional given only the
//! other indicators and the inclusion weight. Coefficients of excluded
//! regressors are exactly zero in every draw; included ones are refreshed
//! from their closed-form normal posterior each iteration.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::chain::{ChainOutput, ChainState, McmcConfig};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::marginal::{log_marginal_likelihood, posterior_moments};
use crate::prior::{DiracSlab, PriorFamily, PriorSpec};
use crate::samplers::{draw_inverse_gamma, draw_omega, sigmoid};

/// Log marginal likelihood, with invalid models mapped to negative
/// infinity so they are never moved into.
fn log_ml_or_neg_inf(data: &Dataset, delta: &[bool], slab: DiracSlab) -> Result<f64> {
    match log_marginal_likelihood(data, delta, slab) {
        Ok(v) => Ok(v),
        Err(
            Error::SingularDesign { .. }
            | Error::DegenerateFit { .. }
            | Error::TooFewObservations { .. },
        ) => Ok(f64::NEG_INFINITY),
        Err(e) => Err(e),
    }
}

pub fn run_dirac_spike_mcmc(
    data: &Dataset,
    prior: &PriorSpec,
    cfg: &McmcConfig,
) -> Result<ChainOutput> {
    let slab = match prior.family {
        PriorFamily::Dirac(s) => s,
        PriorFamily::Continuous(_) => {
            return Err(Error::InvalidInput(
                "point-mass sampler called with a continuous-spike prior".to_string(),
            ))
        }
    };
    prior.validate()?;
    cfg.validate()?;

    let n = data.n();
    let d = data.d();
    let nf = n as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut state = ChainState {
        mu: data.y_bar(),
        alpha: DVector::zeros(d),
        delta: vec![true; d],
        omega: prior.omega.a / (prior.omega.a + prior.omega.b),
        sigma2: data.s_y2().max(1e-12),
        psi: None,
    };
    let mut current_lml = log_ml_or_neg_inf(data, &state.delta, slab)?;

    let m = cfg.iterations;
    let mut incl_prob = DMatrix::zeros(m, d);
    let mut delta_draws = DMatrix::zeros(if cfg.store_traces { m } else { 0 }, d);
    let mut alpha_draws = DMatrix::zeros(if cfg.store_traces { m } else { 0 }, d);
    let mut sigma2_draws = DVector::zeros(if cfg.store_traces { m } else { 0 });
    let mut omega_draws = DVector::zeros(if cfg.store_traces { m } else { 0 });
    let mut delta_sum = vec![0.0_f64; d];
    let mut order: Vec<usize> = (0..d).collect();
    let mut probs = vec![0.0_f64; d];

    let sweep = |state: &mut ChainState,
                 current_lml: &mut f64,
                 rng: &mut ChaCha8Rng,
                 probs: &mut [f64],
                 order: &mut [usize],
                 hold_full: bool|
     -> Result<()> {
        if !hold_full {
            order.shuffle(rng);
            let prior_logit = (state.omega / (1.0 - state.omega)).ln();
            for &j in order.iter() {
                state.delta[j] = !state.delta[j];
                let flipped_lml = log_ml_or_neg_inf(data, &state.delta, slab)?;
                state.delta[j] = !state.delta[j];

                let (lml_in, lml_out) = if state.delta[j] {
                    (*current_lml, flipped_lml)
                } else {
                    (flipped_lml, *current_lml)
                };
                if lml_in == f64::NEG_INFINITY && lml_out == f64::NEG_INFINITY {
                    // Both candidates invalid: the current state is already
                    // outside the supported model space. Hold the indicator.
                    probs[j] = state.delta[j] as u8 as f64;
                    continue;
                }
                let p = sigmoid(prior_logit + lml_in - lml_out);
                probs[j] = p;
                let include = rng.random::<f64>() < p;
                if include != state.delta[j] {
                    state.delta[j] = include;
                    *current_lml = flipped_lml;
                }
            }
        }

        // Error variance and intercept from the marginalized posterior at
        // the current model.
        let post = posterior_moments(data, &state.delta, slab)?;
        state.sigma2 = draw_inverse_gamma(rng, post.shape_n, post.s_n);
        state.mu = data.y_bar()
            + (state.sigma2 / nf).sqrt() * rng.sample::<f64, _>(StandardNormal);

        state.omega = draw_omega(rng, prior.omega.a, prior.omega.b, state.d1(), d);

        // Coefficients: exact zeros outside the model, closed-form normal
        // posterior inside.
        state.alpha.fill(0.0);
        let drawn = post.sample_coefficients(state.sigma2, rng);
        for (k, &j) in post.indices.iter().enumerate() {
            state.alpha[j] = drawn[k];
        }
        Ok(())
    };

    for it in 0..cfg.burn_in {
        sweep(
            &mut state,
            &mut current_lml,
            &mut rng,
            &mut probs,
            &mut order,
            it < cfg.full_model_warmup,
        )?;
    }

    let start = Instant::now();
    for it in 0..m {
        sweep(
            &mut state,
            &mut current_lml,
            &mut rng,
            &mut probs,
            &mut order,
            false,
        )?;
        for j in 0..d {
            incl_prob[(it, j)] = probs[j];
            delta_sum[j] += state.delta[j] as u8 as f64;
        }
        if cfg.store_traces {
            for j in 0..d {
                delta_draws[(it, j)] = state.delta[j] as u8;
                alpha_draws[(it, j)] = state.alpha[j];
            }
            sigma2_draws[it] = state.sigma2;
            omega_draws[it] = state.omega;
        }
    }
    let wall_time_seconds = start.elapsed().as_secs_f64();

    Ok(ChainOutput {
        m,
        d,
        incl_prob,
        delta_draws,
        alpha_draws,
        sigma2_draws,
        omega_draws,
        delta_mean: delta_sum.iter().map(|s| s / m as f64).collect(),
        wall_time_seconds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prior::OmegaPrior;

    fn tiny_dataset() -> Dataset {
        Dataset::load(
            &[0.4, 1.9, -0.7, 2.2, 0.1, -1.3],
            &DMatrix::from_row_slice(
                6,
                2,
                &[
                    0.5, -1.0, //
                    1.2, 0.4, //
                    -0.8, 0.9, //
                    1.9, -0.3, //
                    -0.4, 1.1, //
                    -2.4, -1.1,
                ],
            ),
            true,
        )
        .unwrap()
    }

    #[test]
    fn excluded_coefficients_are_exact_zeros() {
        let data = tiny_dataset();
        let prior = PriorSpec::new(
            PriorFamily::Dirac(DiracSlab::Independence { c: 1.0 }),
            OmegaPrior::default(),
        )
        .unwrap();
        let mut cfg = McmcConfig::default_lengths(3);
        cfg.iterations = 400;
        cfg.burn_in = 50;
        cfg.full_model_warmup = 25;
        cfg.store_traces = true;
        let out = run_dirac_spike_mcmc(&data, &prior, &cfg).unwrap();
        let mut saw_exclusion = false;
        for it in 0..out.m {
            for j in 0..out.d {
                if out.delta_draws[(it, j)] == 0 {
                    saw_exclusion = true;
                    assert_eq!(out.alpha_draws[(it, j)], 0.0);
                }
            }
        }
        assert!(saw_exclusion, "chain never excluded anything; test is vacuous");
    }

    #[test]
    fn rejects_continuous_prior() {
        let data = tiny_dataset();
        let prior = PriorSpec::new(
            PriorFamily::Continuous(crate::prior::ContinuousSpike::Ssvs { r: 1e-4, v: 1.0 }),
            OmegaPrior::default(),
        )
        .unwrap();
        let err =
            run_dirac_spike_mcmc(&data, &prior, &McmcConfig::default_lengths(1)).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }
}
