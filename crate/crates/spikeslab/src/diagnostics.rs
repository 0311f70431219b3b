//! Chain-quality metrics and selection summaries.
//!
//! The inefficiency factor tau = 1 + 2*sum(rho(l)) measures how many
//! correlated draws carry the information of one independent draw; the
//! effective sample size is the chain length divided by tau. Truncation of
//! the autocorrelation sum follows the initial monotone sequence rule:
//! sums of adjacent autocorrelation pairs are kept while positive, then
//! forced nonincreasing by a running minimum.

use crate::chain::ChainOutput;
use crate::error::{Error, Result};

/// Minimum series length accepted by the estimators.
pub const MIN_SERIES_LEN: usize = 10;

/// Inefficiency factor of a series, or `None` when the series is constant
/// (autocorrelations are undefined; selection chains pinned at one
/// probability value produce exactly this).
///
/// Autocovariances use the biased divide-by-length estimator, which keeps
/// the truncated sum stable at large lags. Lags are capped at half the
/// series length; the monotone truncation almost always stops far earlier.
pub fn iact_initial_monotone(series: &[f64]) -> Result<Option<f64>> {
    let m = series.len();
    if m < MIN_SERIES_LEN {
        return Err(Error::SeriesTooShort {
            len: m,
            min: MIN_SERIES_LEN,
        });
    }
    let mf = m as f64;
    let mean = series.iter().sum::<f64>() / mf;
    let centered: Vec<f64> = series.iter().map(|x| x - mean).collect();

    let gamma = |lag: usize| -> f64 {
        centered[..m - lag]
            .iter()
            .zip(&centered[lag..])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / mf
    };

    let gamma0 = gamma(0);
    // Constant series: the variance is zero up to rounding noise. Naive
    // summation of m equal values perturbs the mean by up to m * eps
    // relative, so the per-term deviation noise is (m * eps * mean)^2.
    let noise = mf * f64::EPSILON;
    if gamma0 <= noise * noise * (1.0 + mean * mean) {
        return Ok(None);
    }

    let max_lag = m / 2;
    // Pair sums of autocorrelations, computed lazily; stop at the first
    // nonpositive pair, then enforce a nonincreasing sequence.
    let mut sum_pairs = 0.0;
    let mut running_min = f64::INFINITY;
    let mut k = 0usize;
    loop {
        let l0 = 2 * k;
        let l1 = 2 * k + 1;
        if l1 > max_lag {
            break;
        }
        let pair = (gamma(l0) + gamma(l1)) / gamma0;
        if pair <= 0.0 {
            break;
        }
        running_min = running_min.min(pair);
        sum_pairs += running_min;
        k += 1;
    }
    Ok(Some(2.0 * sum_pairs - 1.0))
}

/// Effective sample size `m / tau`; `None` propagates from the
/// inefficiency factor.
pub fn effective_sample_size(series: &[f64], m: usize) -> Result<Option<f64>> {
    Ok(iact_initial_monotone(series)?.map(|tau| m as f64 / tau))
}

/// True coefficient pattern for scoring a selection against.
#[derive(Debug, Clone)]
pub struct Truth {
    /// Whether each true coefficient is nonzero.
    pub nonzero: Vec<bool>,
    /// Regressors over which the misclassification rate is computed
    /// (typically the weak and zero effects); `None` scores all of them.
    pub assess: Option<Vec<usize>>,
}

/// Per-regressor selection summary of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionReport {
    /// Estimated posterior inclusion probabilities (means of the stored
    /// conditional probabilities).
    pub incl_prob_hat: Vec<f64>,
    /// Inefficiency factor of each probability series; absent when the
    /// series is constant.
    pub iact: Vec<Option<f64>>,
    /// Effective sample size of each probability series.
    pub ess: Vec<Option<f64>>,
    /// Effective draws per second of sampling time.
    pub ess_per_sec: Vec<Option<f64>>,
    /// Median-probability-model membership: inclusion probability above
    /// one half.
    pub mpm: Vec<bool>,
    /// Fraction of assessed regressors whose membership flag disagrees
    /// with the true pattern; present only when a truth was supplied.
    pub misclassification_rate: Option<f64>,
}

/// Summarizes a chain into per-regressor selection quantities.
///
/// A nonzero effect counts as misclassified when left out of the median
/// probability model; a zero effect counts as misclassified when included.
pub fn summarize(output: &ChainOutput, truth: Option<&Truth>) -> SelectionReport {
    let d = output.d;
    let incl_prob_hat = output.incl_prob_mean();
    let mut iact = Vec::with_capacity(d);
    let mut ess = Vec::with_capacity(d);
    let mut ess_per_sec = Vec::with_capacity(d);
    for j in 0..d {
        let series = output.incl_prob_series(j);
        // Short chains simply get no mixing diagnostics.
        let tau = iact_initial_monotone(&series).unwrap_or(None);
        let e = tau.map(|t| output.m as f64 / t);
        let eps = match (e, output.wall_time_seconds > 0.0) {
            (Some(v), true) => Some(v / output.wall_time_seconds),
            _ => None,
        };
        iact.push(tau);
        ess.push(e);
        ess_per_sec.push(eps);
    }
    let mpm: Vec<bool> = incl_prob_hat.iter().map(|&p| p > 0.5).collect();

    let misclassification_rate = truth.map(|t| {
        let all: Vec<usize> = (0..d).collect();
        let idx = t.assess.as_deref().unwrap_or(&all);
        let wrong = idx
            .iter()
            .filter(|&&j| mpm[j] != t.nonzero[j])
            .count();
        wrong as f64 / idx.len() as f64
    });

    SelectionReport {
        incl_prob_hat,
        iact,
        ess,
        ess_per_sec,
        mpm,
        misclassification_rate,
    }
}

/// Mean of the defined values, with the count of skipped undefined ones.
/// Mirrors table summaries that average inefficiency factors only over
/// chains where they exist.
pub fn mean_defined(values: &[Option<f64>]) -> (Option<f64>, usize) {
    let defined: Vec<f64> = values.iter().filter_map(|v| *v).collect();
    let skipped = values.len() - defined.len();
    if defined.is_empty() {
        (None, skipped)
    } else {
        (Some(defined.iter().sum::<f64>() / defined.len() as f64), skipped)
    }
}
