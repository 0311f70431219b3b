//! Bayesian variable selection for Gaussian linear regression with
//! spike-and-slab priors.
//!
//! The model is `y = mu*1 + X*alpha + eps` with centered covariates, an
//! improper flat prior on the intercept, and `p(sigma^2) = 1/sigma^2`. Each
//! coefficient gets a two-component mixture prior indexed by a binary
//! inclusion indicator: a spike that shrinks negligible effects toward (or
//! exactly to) zero and a slab covering plausible effect sizes.
//!
//! Five priors are implemented, in two families:
//!
//! * continuous spikes: a normal spike/slab pair differing by a variance
//!   ratio, and a normal scale mixture whose components are marginally
//!   Student-t ([`prior::ContinuousSpike`]);
//! * a point-mass spike paired with an independence, Zellner, or
//!   fractional slab ([`prior::DiracSlab`]).
//!
//! Each family has its own sampler behind [`samplers::run_mcmc`]. The
//! point-mass family additionally has closed-form marginal likelihoods
//! ([`marginal`]), exact small-space enumeration ([`exact`]), and
//! closed-form inclusion probabilities for known error variance
//! ([`analytic`]). [`diagnostics`] scores chains (inefficiency factors,
//! effective sample size, median probability model) and [`simulation`]
//! provides reproducible benchmark designs.

pub mod analytic;
pub mod chain;
pub mod data;
pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod marginal;
pub mod prior;
pub mod samplers;
pub mod simulation;

pub use chain::{ChainOutput, ChainState, McmcConfig};
pub use data::Dataset;
pub use error::{Error, Result};
pub use prior::{ContinuousSpike, DiracSlab, OmegaPrior, PriorFamily, PriorSpec};

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use proptest::prelude::*;

    // The centered likelihood split used everywhere: the full sum of
    // squares separates into the intercept part and the centered part.
    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sum_of_squares_decomposition(
            seed in 0u64..1000,
            mu in -3.0f64..3.0,
            a1 in -2.0f64..2.0,
            a2 in -2.0f64..2.0,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 12;
            let raw_x = DMatrix::from_fn(n, 2, |_, _| rng.random::<f64>() * 4.0 - 2.0);
            let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect();
            let data = Dataset::load(&y, &raw_x, true).unwrap();

            let alpha = DVector::from_vec(vec![a1, a2]);
            let nf = n as f64;
            let full: f64 = {
                let fitted = data.x() * &alpha;
                data.y()
                    .iter()
                    .zip(fitted.iter())
                    .map(|(yi, fi)| (yi - mu - fi).powi(2))
                    .sum()
            };
            let centered: f64 = {
                let fitted = data.x() * &alpha;
                data.y_c()
                    .iter()
                    .zip(fitted.iter())
                    .map(|(yi, fi)| (yi - fi).powi(2))
                    .sum()
            };
            let split = nf * (data.y_bar() - mu).powi(2) + centered;
            prop_assert!((full - split).abs() <= 1e-8 * full.abs().max(1.0));
        }
    }
}
