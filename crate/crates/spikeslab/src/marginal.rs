//! Closed-form posterior moments and marginal likelihoods for point-mass
//! spike models.
//!
//! With the intercept and error variance integrated out under the improper
//! prior `p(mu, sigma^2) = 1/sigma^2`, every slab admits a closed-form
//! marginal likelihood
//!
//! ```text
//! p(y | delta) = 1/(sqrt(N) (2pi)^{(N-1)/2})
//!              * sqrt(|A_N| / |A_0|)
//!              * Gamma(s_N) / S_N^{s_N},      s_N = (N-1)/2,
//! ```
//!
//! where `A_0` and `A_N` are the prior and posterior covariance factors of
//! the included coefficients and `S_N` is the scale of the inverse-Gamma
//! posterior of `sigma^2`. Everything here is computed in log space; the
//! indicator samplers only ever exponentiate log-differences.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::ln_gamma;

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::prior::DiracSlab;

/// Posterior quantities for the included coefficients under one indicator
/// configuration.
///
/// Conditional on the error variance, the included coefficients are normal
/// with mean `mean` and covariance `cov * sigma2`; the error variance itself
/// is inverse-Gamma with shape `shape_n` and scale `s_n`.
#[derive(Debug, Clone)]
pub struct PosteriorMoments {
    /// Included column indices, ascending.
    pub indices: Vec<usize>,
    /// Posterior mean of the included coefficients.
    pub mean: DVector<f64>,
    /// Posterior covariance factor; multiply by the error variance.
    pub cov: DMatrix<f64>,
    /// Inverse-Gamma scale of the error-variance posterior.
    pub s_n: f64,
    /// Inverse-Gamma shape, always `(N - 1) / 2`.
    pub shape_n: f64,
    /// `(1/2) * log(|cov| / |prior cov|)`, the model-size penalty.
    pub log_det_ratio: f64,
    /// Lower Cholesky factor of the posterior precision (before the
    /// `cov_scale` adjustment); `None` for the empty model.
    prec_l: Option<DMatrix<f64>>,
    /// `cov = cov_scale * (prec_l * prec_l')^{-1}`.
    cov_scale: f64,
}

impl PosteriorMoments {
    /// Number of included coefficients.
    pub fn d1(&self) -> usize {
        self.indices.len()
    }

    /// Draws the included coefficients from their conditional posterior
    /// given the error variance. Returns an empty vector for the empty
    /// model.
    pub fn sample_coefficients<R: Rng + ?Sized>(
        &self,
        sigma2: f64,
        rng: &mut R,
    ) -> DVector<f64> {
        let d1 = self.d1();
        if d1 == 0 {
            return DVector::zeros(0);
        }
        let l = self.prec_l.as_ref().expect("factor present when d1 > 0");
        let z = DVector::from_fn(d1, |_, _| rng.sample::<f64, _>(StandardNormal));
        // cov = cov_scale * (L L')^{-1}, so L'^{-1} z has the right shape.
        let w = l
            .tr_solve_lower_triangular(&z)
            .expect("Cholesky factor has positive diagonal");
        &self.mean + w * (sigma2 * self.cov_scale).sqrt()
    }
}

/// Computes the posterior moments for the coefficients selected by `delta`
/// under the given slab.
///
/// For the empty model the scale is `y_c'y_c / 2` and the determinant ratio
/// is zero regardless of the slab. The fractional slab additionally needs
/// `N >= d1 + 2` so that the residual sum of squares is positive almost
/// surely.
pub fn posterior_moments(
    data: &Dataset,
    delta: &[bool],
    slab: DiracSlab,
) -> Result<PosteriorMoments> {
    let d = data.d();
    if delta.len() != d {
        return Err(Error::DeltaLengthMismatch {
            delta_len: delta.len(),
            d,
        });
    }
    let n = data.n();
    let shape_n = (n as f64 - 1.0) / 2.0;
    let indices: Vec<usize> = (0..d).filter(|&j| delta[j]).collect();
    let d1 = indices.len();

    if d1 == 0 {
        let s_n = data.yty() / 2.0;
        check_scale(s_n)?;
        return Ok(PosteriorMoments {
            indices,
            mean: DVector::zeros(0),
            cov: DMatrix::zeros(0, 0),
            s_n,
            shape_n,
            log_det_ratio: 0.0,
            prec_l: None,
            cov_scale: 1.0,
        });
    }

    if let DiracSlab::Fractional { .. } = slab {
        if n < d1 + 2 {
            return Err(Error::TooFewObservations { n, d1 });
        }
    }

    let mut base = data.gram_submatrix(&indices);
    if let DiracSlab::Independence { c } = slab {
        for k in 0..d1 {
            base[(k, k)] += 1.0 / c;
        }
    }
    let max_diag = base.diagonal().max();
    let singular = || Error::SingularDesign {
        delta: delta.iter().map(|&b| b as u8).collect(),
    };
    let chol = nalgebra::Cholesky::new(base).ok_or_else(singular)?;
    let l = chol.unpack();
    if !matches!(slab, DiracSlab::Independence { .. }) {
        // Rounding can leave a rank-deficient Gram submatrix with a tiny
        // positive pivot instead of a failed factorization; a squared pivot
        // at the rounding-noise floor of the largest diagonal entry means
        // the selected columns are linearly dependent.
        let min_pivot = l.diagonal().min();
        if min_pivot * min_pivot <= 32.0 * d1 as f64 * f64::EPSILON * max_diag {
            return Err(singular());
        }
    }

    let log_det_base: f64 = 2.0 * l.diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let (cov_scale, log_det_ratio) = match slab {
        // |A_N| = |X'X + I/c|^{-1}, |A_0| = c^{d1}.
        DiracSlab::Independence { c } => (1.0, -0.5 * (log_det_base + d1 as f64 * c.ln())),
        // A_N = g/(g+1) (X'X)^{-1}, A_0 = g (X'X)^{-1}.
        DiracSlab::GPrior { g } => (g / (g + 1.0), -0.5 * d1 as f64 * (1.0 + g).ln()),
        // A_N = (X'X)^{-1}, A_0 = (1/b) (X'X)^{-1}.
        DiracSlab::Fractional { b } => (1.0, 0.5 * d1 as f64 * b.ln()),
    };

    let xty = data.xty_subvector(&indices);
    let u = l
        .solve_lower_triangular(&xty)
        .expect("Cholesky factor has positive diagonal");
    let base_inv_xty = l
        .tr_solve_lower_triangular(&u)
        .expect("Cholesky factor has positive diagonal");
    let mean = &base_inv_xty * cov_scale;

    // mean'A_N^{-1}mean = xty'A_N xty = cov_scale * xty'base^{-1}xty.
    let explained = cov_scale * xty.dot(&base_inv_xty);
    let s_n = match slab {
        DiracSlab::Independence { .. } | DiracSlab::GPrior { .. } => {
            0.5 * (data.yty() - explained)
        }
        // explained is the fitted sum of squares of the least-squares fit.
        DiracSlab::Fractional { b } => 0.5 * (1.0 - b) * (data.yty() - explained),
    };
    check_scale(s_n)?;

    let l_inv = l
        .solve_lower_triangular(&DMatrix::identity(d1, d1))
        .expect("Cholesky factor has positive diagonal");
    let cov = l_inv.transpose() * l_inv * cov_scale;

    Ok(PosteriorMoments {
        indices,
        mean,
        cov,
        s_n,
        shape_n,
        log_det_ratio,
        prec_l: Some(l),
        cov_scale,
    })
}

fn check_scale(s_n: f64) -> Result<()> {
    if s_n.is_finite() && s_n > 0.0 {
        Ok(())
    } else {
        Err(Error::DegenerateFit { s_n })
    }
}

/// Log marginal likelihood of the model selected by `delta`, with the
/// intercept, coefficients, and error variance integrated out.
pub fn log_marginal_likelihood(data: &Dataset, delta: &[bool], slab: DiracSlab) -> Result<f64> {
    let post = posterior_moments(data, delta, slab)?;
    let n = data.n() as f64;
    Ok(-0.5 * n.ln() - post.shape_n * (2.0 * std::f64::consts::PI).ln()
        + post.log_det_ratio
        + ln_gamma(post.shape_n)
        - post.shape_n * post.s_n.ln())
}

/// Log marginal likelihood of the selected model conditional on a known
/// error variance (only the intercept and coefficients integrated out).
pub fn log_conditional_marginal_likelihood(
    data: &Dataset,
    delta: &[bool],
    slab: DiracSlab,
    sigma2: f64,
) -> Result<f64> {
    if !(sigma2.is_finite() && sigma2 > 0.0) {
        return Err(Error::InvalidHyperparameter {
            name: "sigma2",
            value: sigma2,
            constraint: "must be finite and positive",
        });
    }
    let post = posterior_moments(data, delta, slab)?;
    let n = data.n() as f64;
    Ok(-0.5 * n.ln() - post.shape_n * (2.0 * std::f64::consts::PI * sigma2).ln()
        + post.log_det_ratio
        - post.s_n / sigma2)
}
