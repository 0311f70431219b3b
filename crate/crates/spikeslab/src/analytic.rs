//! Closed-form posterior inclusion probabilities for point-mass spike
//! models when the error variance is known.
//!
//! For orthogonal designs the inclusion probability of one regressor is a
//! function of its least-squares estimate alone:
//!
//! ```text
//! p(included | y, sigma^2) = 1 / (1 + exp(h/2) * (1 - omega)/omega),
//! ```
//!
//! where `h` is twice the log marginal-likelihood drop from including the
//! regressor. Each slab has its own `h`; all share the signature "signal
//! term that decreases with the squared estimate, plus a penalty that grows
//! with the slab spread". A two-regressor variant quantifies how correlation
//! with an already-included regressor discounts the effective signal.

use crate::error::{Error, Result};
use crate::prior::DiracSlab;

/// Inputs for the single-regressor (orthogonal-design) formulas.
#[derive(Debug, Clone, Copy)]
pub struct OrthogonalSetting {
    /// Least-squares estimate of the regressor's coefficient.
    pub alpha_hat: f64,
    /// Sample variance of the regressor column (divisor N).
    pub s_j2: f64,
    /// Sample size.
    pub n: usize,
    /// Known error variance.
    pub sigma2: f64,
    /// Prior inclusion probability.
    pub omega: f64,
}

impl OrthogonalSetting {
    pub fn new(alpha_hat: f64, s_j2: f64, n: usize, sigma2: f64, omega: f64) -> Result<Self> {
        let s = Self {
            alpha_hat,
            s_j2,
            n,
            sigma2,
            omega,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        require("alpha_hat", self.alpha_hat, self.alpha_hat.is_finite())?;
        require("s_j2", self.s_j2, self.s_j2 > 0.0 && self.s_j2.is_finite())?;
        require("n", self.n as f64, self.n >= 1)?;
        require("sigma2", self.sigma2, self.sigma2 > 0.0 && self.sigma2.is_finite())?;
        require_omega(self.omega)
    }
}

/// Inputs for the two-regressor formulas, conditioning on the first
/// regressor being included. Both regressors are standardized to unit
/// sample variance.
#[derive(Debug, Clone, Copy)]
pub struct CorrelatedPairSetting {
    /// Least-squares estimate of the second coefficient in the
    /// two-regressor model.
    pub alpha_hat2: f64,
    /// Sample correlation between the two regressors.
    pub r12: f64,
    /// Sample correlation between the response and the second regressor.
    pub r_y2: f64,
    /// Sample standard deviation of the response.
    pub s_y: f64,
    /// Sample size.
    pub n: usize,
    /// Known error variance.
    pub sigma2: f64,
    /// Prior inclusion probability.
    pub omega: f64,
}

impl CorrelatedPairSetting {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha_hat2: f64,
        r12: f64,
        r_y2: f64,
        s_y: f64,
        n: usize,
        sigma2: f64,
        omega: f64,
    ) -> Result<Self> {
        let s = Self {
            alpha_hat2,
            r12,
            r_y2,
            s_y,
            n,
            sigma2,
            omega,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        require("alpha_hat2", self.alpha_hat2, self.alpha_hat2.is_finite())?;
        require("r12", self.r12, self.r12.abs() < 1.0)?;
        require("r_y2", self.r_y2, self.r_y2.abs() <= 1.0)?;
        require("s_y", self.s_y, self.s_y > 0.0 && self.s_y.is_finite())?;
        require("n", self.n as f64, self.n >= 1)?;
        require("sigma2", self.sigma2, self.sigma2 > 0.0 && self.sigma2.is_finite())?;
        require_omega(self.omega)
    }
}

fn require(name: &'static str, value: f64, ok: bool) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidHyperparameter {
            name,
            value,
            constraint: "out of the valid range for the closed-form setting",
        })
    }
}

fn require_omega(omega: f64) -> Result<()> {
    require("omega", omega, omega > 0.0 && omega < 1.0)
}

/// Twice the log evidence drop from including a single regressor in an
/// orthogonal design, given the error variance.
pub fn h_orthogonal(setting: &OrthogonalSetting, slab: DiracSlab) -> f64 {
    let n = setting.n as f64;
    let signal = n * setting.alpha_hat.powi(2) * setting.s_j2 / setting.sigma2;
    match slab {
        DiracSlab::Independence { c } => {
            let nsc = n * setting.s_j2 * c;
            -signal / (1.0 + 1.0 / nsc) + (nsc + 1.0).ln()
        }
        DiracSlab::GPrior { g } => -signal * g / (g + 1.0) + (g + 1.0).ln(),
        DiracSlab::Fractional { b } => -signal * (1.0 - b) - b.ln(),
    }
}

/// Twice the log evidence drop from including the second of two
/// standardized regressors, the first being already included.
pub fn h_correlated_pair(setting: &CorrelatedPairSetting, slab: DiracSlab) -> f64 {
    let n = setting.n as f64;
    let a2 = setting.alpha_hat2;
    let r12sq = setting.r12.powi(2);
    let signal = n * a2.powi(2) * (1.0 - r12sq) / setting.sigma2;
    match slab {
        DiracSlab::GPrior { g } => -signal * g / (g + 1.0) + (g + 1.0).ln(),
        DiracSlab::Fractional { b } => -signal * (1.0 - b) - b.ln(),
        DiracSlab::Independence { c } => {
            let nc = n * c;
            // Quartic in 1/(Nc); collapses to (1 + 1/(Nc))^3 when r12 = 0.
            let q = (1.0 - r12sq)
                + (3.0 - r12sq) / nc
                + 3.0 / nc.powi(2)
                + 1.0 / nc.powi(3);
            let shifted = a2 * (1.0 - r12sq) + setting.r_y2 * setting.s_y / nc;
            let penalty = nc * (1.0 - r12sq) + 1.0 + r12sq / (1.0 + 1.0 / nc);
            -n * shifted.powi(2) / (q * setting.sigma2) + penalty.ln()
        }
    }
}

/// Maps an evidence value `h` to an inclusion probability at a fixed prior
/// inclusion probability. Decreasing in `h`; equals `omega` at `h = 0`.
pub fn inclusion_probability_from_h(h: f64, omega: f64) -> f64 {
    assert!(
        omega > 0.0 && omega < 1.0,
        "omega must lie strictly in (0, 1), got {omega}"
    );
    // exp overflow gives +inf and the quotient collapses to 0; underflow
    // gives exactly 1. Both limits are the correct ones.
    1.0 / (1.0 + (h / 2.0).exp() * (1.0 - omega) / omega)
}

/// Inclusion probability with the prior inclusion probability integrated
/// out over a Beta distribution, by fixed-order Gauss-Legendre quadrature.
///
/// Deterministic; exact for polynomial integrands up to degree 255. The
/// integrand is smooth and bounded whenever `a_omega, b_omega >= 1`, but
/// at strongly negative h it develops a boundary layer of width exp(h/2)
/// near omega = 0, so the order must stay well above the layer scale;
/// 128 nodes hold the error below 1e-6 for |h| <= 10. Accuracy degrades
/// for shape parameters below 1 (integrable endpoint singularities).
pub fn inclusion_probability_integrated_omega(h: f64, a_omega: f64, b_omega: f64) -> f64 {
    assert!(
        a_omega > 0.0 && b_omega > 0.0,
        "Beta shape parameters must be positive, got ({a_omega}, {b_omega})"
    );
    let ln_beta = statrs::function::beta::ln_beta(a_omega, b_omega);
    gauss_legendre_unit(128)
        .iter()
        .map(|&(x, w)| {
            let ln_pdf = (a_omega - 1.0) * x.ln() + (b_omega - 1.0) * (1.0 - x).ln() - ln_beta;
            w * inclusion_probability_from_h(h, x) * ln_pdf.exp()
        })
        .sum::<f64>()
        // Quadrature noise of order machine epsilon must not push a
        // probability outside its range.
        .clamp(0.0, 1.0)
}

/// Gauss-Legendre nodes and weights on (0, 1).
///
/// Nodes are the roots of the order-`n` Legendre polynomial found by Newton
/// iteration from the Chebyshev initial guess, then mapped from (-1, 1).
pub fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Value and derivative of the order-`n` Legendre polynomial at `x`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn setting(alpha_hat: f64) -> OrthogonalSetting {
        OrthogonalSetting::new(alpha_hat, 1.0, 40, 1.0, 0.5).unwrap()
    }

    #[test]
    fn zero_estimate_leaves_only_the_penalty() {
        let h = h_orthogonal(&setting(0.0), DiracSlab::GPrior { g: 40.0 });
        assert_relative_eq!(h, 41.0_f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn independence_and_g_slab_agree_when_nc_equals_g() {
        // With unit regressor variance the two penalties coincide at g = Nc.
        for alpha_hat in [0.0, 0.13, 0.5, 1.2, -0.8] {
            let s = setting(alpha_hat);
            let c = 2.3;
            let hi = h_orthogonal(&s, DiracSlab::Independence { c });
            let hg = h_orthogonal(&s, DiracSlab::GPrior { g: 40.0 * c });
            assert_relative_eq!(hi, hg, epsilon = 1e-12);
        }
    }

    #[test]
    fn inclusion_curve_spot_values() {
        // Independent recomputation of the single-regressor curve at a few
        // grid points, N = 40, c = 1.
        for alpha_hat in [0.0, 0.375, 0.75, 1.125, 1.5] {
            let s = setting(alpha_hat);
            let h = h_orthogonal(&s, DiracSlab::Independence { c: 1.0 });
            let direct = -40.0 * alpha_hat * alpha_hat / (1.0 + 1.0 / 40.0) + 41.0_f64.ln();
            assert_relative_eq!(h, direct, epsilon = 1e-12);
            let p = inclusion_probability_from_h(h, 0.5);
            assert_relative_eq!(p, 1.0 / (1.0 + (direct / 2.0).exp()), epsilon = 1e-12);
        }
    }

    #[test]
    fn correlated_pair_reduces_to_orthogonal_at_zero_correlation() {
        let n = 40;
        for (slab, label) in [
            (DiracSlab::GPrior { g: 40.0 }, "g"),
            (DiracSlab::Fractional { b: 1.0 / 40.0 }, "f"),
        ] {
            for alpha_hat2 in [0.0, 0.4, -0.9, 1.3] {
                let pair =
                    CorrelatedPairSetting::new(alpha_hat2, 0.0, 0.3, 1.5, n, 1.0, 0.5).unwrap();
                let orth = OrthogonalSetting::new(alpha_hat2, 1.0, n, 1.0, 0.5).unwrap();
                assert_relative_eq!(
                    h_correlated_pair(&pair, slab),
                    h_orthogonal(&orth, slab),
                    epsilon = 1e-10,
                    max_relative = 1e-10
                );
                let _ = label;
            }
        }
    }

    #[test]
    fn correlated_independence_slab_reduces_at_zero_correlation() {
        // At r12 = 0 the LS estimate ties to the response correlation as
        // alpha_hat2 = s_y * r_y2; under that tie the pair formula must
        // collapse to the single-regressor one.
        let n = 40;
        let c = 1.0;
        let s_y = 1.7;
        let r_y2s = [-0.55, -0.2, -0.05, 0.0, 0.1, 0.22, 0.35, 0.48, 0.51, 0.58];
        for r_y2 in r_y2s {
            let alpha_hat2 = s_y * r_y2;
            let pair =
                CorrelatedPairSetting::new(alpha_hat2, 0.0, r_y2, s_y, n, 1.0, 0.5).unwrap();
            let orth = OrthogonalSetting::new(alpha_hat2, 1.0, n, 1.0, 0.5).unwrap();
            assert_relative_eq!(
                h_correlated_pair(&pair, DiracSlab::Independence { c }),
                h_orthogonal(&orth, DiracSlab::Independence { c }),
                epsilon = 1e-10,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn correlation_discounts_the_signal_under_the_g_slab() {
        let mut last = f64::NEG_INFINITY;
        for r12 in [0.0, 0.3, 0.6, 0.9, 0.99] {
            let pair = CorrelatedPairSetting::new(0.8, r12, 0.3, 1.5, 40, 1.0, 0.5).unwrap();
            let h = h_correlated_pair(&pair, DiracSlab::GPrior { g: 40.0 });
            assert!(h > last, "h not increasing at r12 = {r12}");
            last = h;
        }
    }

    #[test]
    fn probability_map_limits_and_neutral_point() {
        assert_relative_eq!(inclusion_probability_from_h(0.0, 0.5), 0.5);
        assert_relative_eq!(inclusion_probability_from_h(0.0, 0.23), 0.23, epsilon = 1e-15);
        assert_eq!(inclusion_probability_from_h(f64::INFINITY, 0.5), 0.0);
        assert_eq!(inclusion_probability_from_h(f64::NEG_INFINITY, 0.5), 1.0);
        assert_eq!(inclusion_probability_from_h(5000.0, 0.5), 0.0);
        assert_relative_eq!(inclusion_probability_from_h(-5000.0, 0.5), 1.0);
    }

    #[test]
    fn zero_effect_inclusion_with_unit_slab() {
        // N = 40, c = 1, s^2 = 1, alpha_hat = 0: h = log(41), and at even
        // prior odds the probability is 1/(1 + sqrt(41)).
        let h = h_orthogonal(&setting(0.0), DiracSlab::Independence { c: 1.0 });
        assert_relative_eq!(h, 41.0_f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(
            inclusion_probability_from_h(h, 0.5),
            1.0 / (1.0 + 41.0_f64.sqrt()),
            epsilon = 1e-14
        );
    }

    #[test]
    fn integrated_omega_uniform_neutral_case_is_exactly_half() {
        // At h = 0 the integrand reduces to omega itself.
        let p = inclusion_probability_integrated_omega(0.0, 1.0, 1.0);
        assert_relative_eq!(p, 0.5, epsilon = 1e-14);
    }

    #[test]
    fn integrated_omega_matches_high_order_reference() {
        let ln_beta = statrs::function::beta::ln_beta(1.0, 1.0);
        let reference: f64 = gauss_legendre_unit(1000)
            .iter()
            .map(|&(x, w)| {
                let ln_pdf = -ln_beta;
                w * inclusion_probability_from_h(-10.0, x) * ln_pdf.exp()
            })
            .sum();
        let got = inclusion_probability_integrated_omega(-10.0, 1.0, 1.0);
        assert_relative_eq!(got, reference, epsilon = 1e-6);
    }

    #[test]
    fn integrated_omega_monotone_decreasing_in_h() {
        let mut last = f64::INFINITY;
        for h in [-20.0, -5.0, 0.0, 2.0, 8.0, 30.0] {
            let p = inclusion_probability_integrated_omega(h, 2.0, 3.0);
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn gauss_legendre_integrates_low_order_monomials_exactly() {
        for n in [2usize, 8, 64] {
            let nodes = gauss_legendre_unit(n);
            let total: f64 = nodes.iter().map(|&(_, w)| w).sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-13);
            let x3: f64 = nodes.iter().map(|&(x, w)| w * x * x * x).sum();
            assert_relative_eq!(x3, 0.25, epsilon = 1e-13);
        }
    }

    proptest! {
        #[test]
        fn signal_monotonicity_in_squared_estimate(
            a in 0.01f64..2.0,
            scale in 1.01f64..3.0,
            which in 0usize..3,
        ) {
            let slab = match which {
                0 => DiracSlab::Independence { c: 1.0 },
                1 => DiracSlab::GPrior { g: 40.0 },
                _ => DiracSlab::Fractional { b: 1.0 / 40.0 },
            };
            let h_small = h_orthogonal(&setting(a), slab);
            let h_large = h_orthogonal(&setting(a * scale), slab);
            prop_assert!(h_large < h_small);
            let p_small = inclusion_probability_from_h(h_small, 0.5);
            let p_large = inclusion_probability_from_h(h_large, 0.5);
            prop_assert!(p_large >= p_small);
        }

        #[test]
        fn penalty_monotonicity_at_zero_estimate(
            lo in 0.05f64..5.0,
            factor in 1.1f64..10.0,
        ) {
            let s = setting(0.0);
            let hi = lo * factor;
            let h_c_lo = h_orthogonal(&s, DiracSlab::Independence { c: lo });
            let h_c_hi = h_orthogonal(&s, DiracSlab::Independence { c: hi });
            prop_assert!(h_c_lo < h_c_hi);
            let h_g_lo = h_orthogonal(&s, DiracSlab::GPrior { g: lo });
            let h_g_hi = h_orthogonal(&s, DiracSlab::GPrior { g: hi });
            prop_assert!(h_g_lo < h_g_hi);
            let b_lo = (lo / (hi + 5.0)).min(0.9);
            let b_hi = (b_lo * 1.05).min(0.95);
            let h_b_lo = h_orthogonal(&s, DiracSlab::Fractional { b: b_lo });
            let h_b_hi = h_orthogonal(&s, DiracSlab::Fractional { b: b_hi });
            prop_assert!(h_b_lo > h_b_hi);
        }

        #[test]
        fn probability_is_within_bounds(h in -100.0f64..100.0, omega in 0.001f64..0.999) {
            let p = inclusion_probability_from_h(h, omega);
            prop_assert!((0.0..=1.0).contains(&p));
            let q = inclusion_probability_integrated_omega(h, 1.0, 1.0);
            prop_assert!((0.0..=1.0).contains(&q));
        }
    }
}
