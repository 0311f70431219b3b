//! Shared helpers for the integration suites: an adaptive quadrature
//! oracle for the closed-form marginal likelihoods, random problem
//! builders, and Monte-Carlo error estimates.
//!
//! The oracle computes marginal likelihoods by direct numerical
//! integration of likelihood times prior, sharing no linear algebra with
//! the library: Gram entries, least-squares solves, and determinants are
//! recomputed here by hand for at most two included regressors. Residual
//! sums of squares are evaluated by plain loops over the data at every
//! quadrature node rather than through any expanded identity.

#![allow(dead_code)]

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use spikeslab::analytic::gauss_legendre_unit;
use spikeslab::prior::DiracSlab;
use spikeslab::Dataset;

const LN_2PI: f64 = 1.8378770664093453;

/// Composite adaptive Simpson rule with a fixed error budget.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let c = 0.5 * (a + b);
    let fa = f(a);
    let fb = f(b);
    let fc = f(c);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    simpson_rec(f, a, b, fa, fb, fc, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let c = 0.5 * (a + b);
    let d = 0.5 * (a + c);
    let e = 0.5 * (c + b);
    let fd = f(d);
    let fe = f(e);
    let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, c, fa, fc, fd, left, tol / 2.0, depth - 1)
            + simpson_rec(f, c, b, fc, fb, fe, right, tol / 2.0, depth - 1)
    }
}

/// Integrates `exp(g(t))` over `[lo, hi]` and returns the log of the
/// integral. A probe grid locates the peak so the exponential can be
/// rescaled before the adaptive pass; the integration bracket is clipped
/// to where the integrand is within 70 log units of the peak.
pub fn integrate_log_scaled(g: &dyn Fn(f64) -> f64, lo: f64, hi: f64, probes: usize) -> f64 {
    let step = (hi - lo) / probes as f64;
    let values: Vec<f64> = (0..=probes).map(|i| g(lo + step * i as f64)).collect();
    let k = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !k.is_finite() {
        return f64::NEG_INFINITY;
    }
    let first = values.iter().position(|&v| v > k - 70.0).unwrap();
    let last = values.iter().rposition(|&v| v > k - 70.0).unwrap();
    let a = lo + step * first.saturating_sub(1) as f64;
    let b = lo + step * (last + 1).min(probes) as f64;

    let coarse: f64 = values[first..=last]
        .iter()
        .map(|&v| (v - k).exp() * step)
        .sum();
    let tol = 1e-9 * coarse.max(1e-300);
    let integral = adaptive_simpson(&|t| (g(t) - k).exp(), a, b, tol);
    k + integral.ln()
}

// Legendre node sets are reused across thousands of inner integrals, so
// requested sizes snap to a small ladder and are memoized per thread.
const NODE_LADDER: [usize; 6] = [48, 64, 96, 128, 192, 320];

thread_local! {
    static GL_CACHE: RefCell<HashMap<usize, Rc<Vec<(f64, f64)>>>> =
        RefCell::new(HashMap::new());
}

fn gl_nodes(min_size: usize) -> Rc<Vec<(f64, f64)>> {
    let size = *NODE_LADDER
        .iter()
        .find(|&&s| s >= min_size)
        .unwrap_or(NODE_LADDER.last().unwrap());
    GL_CACHE.with(|cache| {
        cache
            .borrow_mut()
            .entry(size)
            .or_insert_with(|| Rc::new(gauss_legendre_unit(size)))
            .clone()
    })
}

/// Data and hand-computed summaries for one inclusion pattern: columns
/// copied out, Gram entries by direct dot products, least squares by the
/// explicit one- and two-dimensional formulas.
struct OracleModel {
    y: Vec<f64>,
    cols: Vec<Vec<f64>>,
    gram: Vec<Vec<f64>>,
    ls: Vec<f64>,
    det: f64,
}

impl OracleModel {
    fn new(data: &Dataset, idx: &[usize]) -> Self {
        let n = data.n();
        let y: Vec<f64> = data.y_c().iter().copied().collect();
        let cols: Vec<Vec<f64>> = idx
            .iter()
            .map(|&j| (0..n).map(|i| data.x()[(i, j)]).collect())
            .collect();
        let d1 = cols.len();
        let mut gram = vec![vec![0.0; d1]; d1];
        for r in 0..d1 {
            for c in 0..d1 {
                gram[r][c] = cols[r].iter().zip(&cols[c]).map(|(a, b)| a * b).sum();
            }
        }
        let xty: Vec<f64> = cols
            .iter()
            .map(|col| col.iter().zip(&y).map(|(a, b)| a * b).sum())
            .collect();
        let (ls, det) = match d1 {
            0 => (vec![], 1.0),
            1 => (vec![xty[0] / gram[0][0]], gram[0][0]),
            2 => {
                let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[0][1];
                (
                    vec![
                        (gram[1][1] * xty[0] - gram[0][1] * xty[1]) / det,
                        (gram[0][0] * xty[1] - gram[0][1] * xty[0]) / det,
                    ],
                    det,
                )
            }
            other => panic!("oracle supports at most two included regressors, got {other}"),
        };
        OracleModel { y, cols, gram, ls, det }
    }

    fn d1(&self) -> usize {
        self.cols.len()
    }

    /// Residual sum of squares by a direct loop over observations.
    fn rss(&self, alpha: &[f64]) -> f64 {
        self.y
            .iter()
            .enumerate()
            .map(|(i, &yi)| {
                let fit: f64 = self.cols.iter().zip(alpha).map(|(c, a)| c[i] * a).sum();
                (yi - fit).powi(2)
            })
            .sum()
    }

    /// (alpha - center)' G (alpha - center).
    fn quad_form(&self, alpha: &[f64], center: &[f64]) -> f64 {
        let mut total = 0.0;
        for r in 0..self.d1() {
            for c in 0..self.d1() {
                total += (alpha[r] - center[r]) * self.gram[r][c] * (alpha[c] - center[c]);
            }
        }
        total
    }

    /// Log of likelihood kernel times prior density at one node.
    fn log_integrand(&self, slab: DiracSlab, alpha: &[f64], sigma2: f64) -> f64 {
        let d1 = self.d1() as f64;
        match slab {
            DiracSlab::Independence { c } => {
                let lp: f64 = alpha
                    .iter()
                    .map(|a| -0.5 * (LN_2PI + (c * sigma2).ln()) - a * a / (2.0 * c * sigma2))
                    .sum();
                -self.rss(alpha) / (2.0 * sigma2) + lp
            }
            DiracSlab::GPrior { g } => {
                let zero = [0.0; 2];
                let lp = -0.5 * d1 * (LN_2PI + (g * sigma2).ln()) + 0.5 * self.det.ln()
                    - self.quad_form(alpha, &zero[..alpha.len()]) / (2.0 * g * sigma2);
                -self.rss(alpha) / (2.0 * sigma2) + lp
            }
            DiracSlab::Fractional { b } => {
                let lp = -0.5 * d1 * (LN_2PI + (sigma2 / b).ln()) + 0.5 * self.det.ln()
                    - b * self.quad_form(alpha, &self.ls) / (2.0 * sigma2);
                -(1.0 - b) * self.rss(alpha) / (2.0 * sigma2) + lp
            }
        }
    }

    /// Integration bracket and node count for coordinate `k`. The bracket
    /// spans the origin and the least-squares point with a wide margin;
    /// the node count resolves the narrowest scale the likelihood-prior
    /// product can have in this coordinate.
    fn bounds(&self, k: usize, slab: DiracSlab, sigma2: f64) -> (f64, f64, usize) {
        let inv_kk = match self.d1() {
            1 => 1.0 / self.gram[0][0],
            _ => self.gram[1 - k][1 - k] / self.det,
        };
        let sd_marginal = (sigma2 * inv_kk).sqrt();
        let sd_conditional = (sigma2 / self.gram[k][k]).sqrt();
        let sd_prior = match slab {
            DiracSlab::Independence { c } => (c * sigma2).sqrt(),
            DiracSlab::GPrior { g } => (g * sigma2 * inv_kk).sqrt(),
            DiracSlab::Fractional { b } => (sigma2 * inv_kk / b).sqrt(),
        };
        let margin = 16.0 * sd_marginal.min(sd_prior) + 0.25 * self.ls[k].abs();
        let lo = self.ls[k].min(0.0) - margin;
        let hi = self.ls[k].max(0.0) + margin;
        // The likelihood-prior product cannot be narrower than its summed
        // precisions allow, which bounds the resolution the rule needs.
        let narrowest = sd_conditional.min(sd_prior) / std::f64::consts::SQRT_2;
        let nodes = (1.2 * (hi - lo) / narrowest).ceil() as usize;
        (lo, hi, nodes.max(48))
    }

    /// Log of the coefficient integral at a fixed error variance, by
    /// Gauss-Legendre quadrature in one or two dimensions.
    fn log_alpha_integral(&self, slab: DiracSlab, sigma2: f64) -> f64 {
        match self.d1() {
            0 => -self.rss(&[]) / (2.0 * sigma2),
            1 => {
                let (lo, hi, n) = self.bounds(0, slab, sigma2);
                let nodes = gl_nodes(n);
                let lf: Vec<f64> = nodes
                    .iter()
                    .map(|&(x, _)| self.log_integrand(slab, &[lo + (hi - lo) * x], sigma2))
                    .collect();
                let k = lf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let sum: f64 = nodes
                    .iter()
                    .zip(&lf)
                    .map(|(&(_, w), &v)| w * (v - k).exp())
                    .sum();
                k + (sum * (hi - lo)).ln()
            }
            2 => {
                let (lo1, hi1, n1) = self.bounds(0, slab, sigma2);
                let (lo2, hi2, n2) = self.bounds(1, slab, sigma2);
                let nodes1 = gl_nodes(n1);
                let nodes2 = gl_nodes(n2);
                let mut lf = Vec::with_capacity(nodes1.len() * nodes2.len());
                for &(x1, _) in nodes1.iter() {
                    let a1 = lo1 + (hi1 - lo1) * x1;
                    for &(x2, _) in nodes2.iter() {
                        lf.push(self.log_integrand(
                            slab,
                            &[a1, lo2 + (hi2 - lo2) * x2],
                            sigma2,
                        ));
                    }
                }
                let k = lf.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut sum = 0.0;
                let mut it = lf.iter();
                for &(_, w1) in nodes1.iter() {
                    for &(_, w2) in nodes2.iter() {
                        sum += w1 * w2 * (it.next().unwrap() - k).exp();
                    }
                }
                k + (sum * (hi1 - lo1) * (hi2 - lo2)).ln()
            }
            other => panic!("oracle supports at most two included regressors, got {other}"),
        }
    }
}

fn included(delta: &[bool]) -> Vec<usize> {
    delta
        .iter()
        .enumerate()
        .filter_map(|(j, &d)| d.then_some(j))
        .collect()
}

/// Log marginal likelihood given the error variance, by quadrature over
/// the included coefficients only (the intercept is integrated
/// analytically through the centering identity).
pub fn oracle_conditional_log_marginal(
    data: &Dataset,
    delta: &[bool],
    slab: DiracSlab,
    sigma2: f64,
) -> f64 {
    let model = OracleModel::new(data, &included(delta));
    let n = data.n() as f64;
    let ln_c = -0.5 * n.ln() - 0.5 * (n - 1.0) * (LN_2PI + sigma2.ln());
    ln_c + model.log_alpha_integral(slab, sigma2)
}

/// Full log marginal likelihood by nested quadrature: coefficients inside,
/// then the error variance under its scale-invariant prior.
pub fn oracle_log_marginal(data: &Dataset, delta: &[bool], slab: DiracSlab) -> f64 {
    let model = OracleModel::new(data, &included(delta));
    let n = data.n() as f64;
    let center = (data.yty() / n).ln();
    // In t = log(sigma2) the prior Jacobian cancels: the integrand is just
    // the conditional marginal at exp(t).
    integrate_log_scaled(
        &|t| {
            let sigma2 = t.exp();
            let ln_c = -0.5 * n.ln() - 0.5 * (n - 1.0) * (LN_2PI + sigma2.ln());
            ln_c + model.log_alpha_integral(slab, sigma2)
        },
        center - 28.0,
        center + 14.0,
        400,
    )
}

/// A reproducible random regression problem: independent standard normal
/// covariates, the first `n_strong` coefficients at `strength`, unit noise
/// variance, intercept one.
pub fn random_problem(n: usize, d: usize, n_strong: usize, strength: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = DMatrix::from_fn(n, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let y: Vec<f64> = (0..n)
        .map(|i| {
            let signal: f64 = (0..n_strong).map(|j| strength * x[(i, j)]).sum();
            1.0 + signal + rng.sample::<f64, _>(StandardNormal)
        })
        .collect();
    Dataset::load(&y, &x, true).unwrap()
}

/// Standard error of the mean of a correlated series: sqrt(variance *
/// inefficiency / length). Zero for constant series, whose mean is exact.
pub fn mc_standard_error(series: &[f64]) -> f64 {
    let m = series.len() as f64;
    let mean = series.iter().sum::<f64>() / m;
    let var = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
    match spikeslab::diagnostics::iact_initial_monotone(series).unwrap() {
        None => 0.0,
        Some(tau) => (var * tau.max(1.0) / m).sqrt(),
    }
}
