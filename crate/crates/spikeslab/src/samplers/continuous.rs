//! Gibbs sampler for the absolutely continuous spike priors.
//!
//! All coefficients stay in the model at every iteration; the indicators
//! only switch each coefficient between the spike and slab scale. One sweep
//! updates, in order: the intercept, the indicators, the scale parameters,
//! the inclusion weight, the full coefficient block, and the error variance.

use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::chain::{ChainOutput, ChainState, McmcConfig};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::prior::{ContinuousSpike, PriorFamily, PriorSpec};
use crate::samplers::{draw_inverse_gamma, draw_omega, sigmoid};

/// Log density ratio spike/slab at one coefficient value.
///
/// For the normal pair this is the ratio of two zero-mean normals differing
/// by the variance ratio. For the scale-mixture pair the mixing parameter
/// is integrated out, giving a ratio of two Student-t densities with the
/// same degrees of freedom and scales differing by the variance ratio;
/// conditioning on the scale parameter instead is known to mix poorly.
fn log_spike_slab_ratio(spike: &ContinuousSpike, alpha: f64) -> f64 {
    match *spike {
        ContinuousSpike::Ssvs { r, v } => {
            -0.5 * r.ln() - 0.5 * alpha * alpha * (1.0 - r) / (r * v)
        }
        ContinuousSpike::Nmig { r, nu, q } => {
            let a2 = alpha * alpha;
            -0.5 * r.ln()
                - (nu + 0.5) * ((1.0 + a2 / (2.0 * r * q)).ln() - (1.0 + a2 / (2.0 * q)).ln())
        }
    }
}

/// Spike/slab variance multiplier for an indicator value.
fn ratio_for(delta: bool, r: f64) -> f64 {
    if delta {
        1.0
    } else {
        r
    }
}

pub fn run_continuous_spike_mcmc(
    data: &Dataset,
    prior: &PriorSpec,
    cfg: &McmcConfig,
) -> Result<ChainOutput> {
    let spike = match prior.family {
        PriorFamily::Continuous(s) => s,
        PriorFamily::Dirac(_) => {
            return Err(Error::InvalidInput(
                "continuous-spike sampler called with a point-mass prior".to_string(),
            ))
        }
    };
    prior.validate()?;
    cfg.validate()?;

    let n = data.n();
    let d = data.d();
    let nf = n as f64;
    let r = spike.r();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Initialization: least squares on the full model when the Gram matrix
    // permits, otherwise the origin; the first sweep resamples everything.
    let (alpha0, sigma20) = match Cholesky::new(data.gram().clone()) {
        Some(chol) => {
            let alpha = chol.solve(data.xty());
            let resid = data.y_c() - data.x() * &alpha;
            (alpha, (resid.dot(&resid) / nf).max(1e-12))
        }
        None => (DVector::zeros(d), data.s_y2().max(1e-12)),
    };
    let psi0 = match spike {
        ContinuousSpike::Ssvs { v, .. } => vec![v; d],
        ContinuousSpike::Nmig { nu, q, .. } => {
            let init = if nu > 1.0 { q / (nu - 1.0) } else { q };
            vec![init; d]
        }
    };
    let mut state = ChainState {
        mu: data.y_bar(),
        alpha: alpha0,
        delta: vec![true; d],
        omega: prior.omega.a / (prior.omega.a + prior.omega.b),
        sigma2: sigma20,
        psi: Some(psi0),
    };

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
                 rng: &mut ChaCha8Rng,
                 probs: &mut [f64],
                 order: &mut [usize],
                 hold_full: bool,
                 iteration: usize|
     -> Result<()> {
        // Intercept, centered likelihood: the coefficient block drops out.
        state.mu = data.y_bar()
            + (state.sigma2 / nf).sqrt() * rng.sample::<f64, _>(StandardNormal);

        // Indicators; the conditional depends only on the coefficient value
        // and the inclusion weight.
        if hold_full {
            state.delta.iter_mut().for_each(|b| *b = true);
        } else {
            order.shuffle(rng);
            let prior_logit = (state.omega / (1.0 - state.omega)).ln();
            for &j in order.iter() {
                let p = sigmoid(prior_logit - log_spike_slab_ratio(&spike, state.alpha[j]));
                probs[j] = p;
                state.delta[j] = rng.random::<f64>() < p;
            }
        }

        // Scale parameters (scale-mixture prior only).
        if let ContinuousSpike::Nmig { nu, q, .. } = spike {
            let psi = state.psi.as_mut().expect("scale vector present");
            for j in 0..d {
                let scale = q + state.alpha[j].powi(2) / (2.0 * ratio_for(state.delta[j], r));
                psi[j] = draw_inverse_gamma(rng, nu + 0.5, scale);
            }
        }

        state.omega = draw_omega(rng, prior.omega.a, prior.omega.b, state.d1(), d);

        // Coefficient block from its multivariate normal full conditional
        // with precision X'X/sigma2 + D^{-1}.
        let psi = state.psi.as_ref().expect("scale vector present");
        let mut precision = data.gram() / state.sigma2;
        for j in 0..d {
            precision[(j, j)] += 1.0 / (ratio_for(state.delta[j], r) * psi[j]);
        }
        let chol = Cholesky::new(precision)
            .ok_or(Error::NumericalBreakdown { iteration })?;
        let mean = chol.solve(&(data.xty() / state.sigma2));
        let z = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let l = chol.unpack();
        let noise = l
            .tr_solve_lower_triangular(&z)
            .expect("Cholesky factor has positive diagonal");
        state.alpha = mean + noise;

        // Error variance given the coefficients.
        let resid = data.y_c() - data.x() * &state.alpha;
        let s_n = 0.5 * resid.dot(&resid);
        if !(s_n.is_finite() && s_n > 0.0) {
            return Err(Error::DegenerateFit { s_n });
        }
        state.sigma2 = draw_inverse_gamma(rng, (nf - 1.0) / 2.0, s_n);
        Ok(())
    };

    for it in 0..cfg.burn_in {
        sweep(
            &mut state,
            &mut rng,
            &mut probs,
            &mut order,
            it < cfg.full_model_warmup,
            it,
        )?;
    }

    let start = Instant::now();
    for it in 0..m {
        sweep(&mut state, &mut rng, &mut probs, &mut order, false, cfg.burn_in + it)?;
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
    use approx::assert_relative_eq;

    #[test]
    fn zero_coefficient_density_ratio_is_inverse_root_of_variance_ratio() {
        let spike = ContinuousSpike::Ssvs { r: 1e-4, v: 1.0 };
        let log_l = log_spike_slab_ratio(&spike, 0.0);
        assert_relative_eq!(log_l.exp(), 100.0, epsilon = 1e-9);
        // At even prior odds the inclusion probability is 1/(1 + L).
        let p = sigmoid(0.0_f64 - log_l);
        assert_relative_eq!(p, 1.0 / 101.0, epsilon = 1e-12);
    }

    #[test]
    fn scale_mixture_ratio_at_zero_matches_normal_pair() {
        // At alpha = 0 the t-density ratio also reduces to 1/sqrt(r).
        let spike = ContinuousSpike::Nmig { r: 1e-4, nu: 5.0, q: 4.0 };
        assert_relative_eq!(log_spike_slab_ratio(&spike, 0.0).exp(), 100.0, epsilon = 1e-9);
    }

    #[test]
    fn scale_mixture_posterior_parameters_at_zero_coefficient() {
        // With shape 5 and scale 4, an included zero coefficient leaves the
        // scale conditional at shape 5.5, scale 4: mean 4/4.5.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = 400_000;
        let mean: f64 = (0..m)
            .map(|_| draw_inverse_gamma(&mut rng, 5.5, 4.0))
            .sum::<f64>()
            / m as f64;
        assert!((mean - 4.0 / 4.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn rejects_point_mass_prior() {
        let data = crate::data::Dataset::load(
            &[1.0, 2.0, 3.0],
            &DMatrix::from_row_slice(3, 1, &[1.0, 2.0, 3.0]),
            true,
        )
        .unwrap();
        let prior = PriorSpec::new(
            PriorFamily::Dirac(crate::prior::DiracSlab::GPrior { g: 3.0 }),
            OmegaPrior::default(),
        )
        .unwrap();
        let err =
            run_continuous_spike_mcmc(&data, &prior, &McmcConfig::default_lengths(1)).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }
}
