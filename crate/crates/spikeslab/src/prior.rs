//! Prior specifications for the regression effects and inclusion indicators.
//!
//! Effects get a two-component mixture prior: a spike concentrated at zero
//! and a flat slab, mixed by independent Bernoulli indicators `delta_j` with
//! common inclusion probability `omega ~ Beta(a, b)`. The spike is either an
//! absolutely continuous density with scale shrunk by a ratio `r`, or a point
//! mass at zero paired with a conjugate multivariate slab.

use crate::error::{Error, Result};

/// Absolutely continuous spike families. Both share the variance ratio `r`
/// between spike and slab components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContinuousSpike {
    /// Normal spike and slab: `alpha_j | psi_j ~ N(0, r(delta_j) * psi_j)`
    /// with fixed `psi_j = v`, so the slab is `N(0, v)` and the spike
    /// `N(0, r*v)`.
    Ssvs { r: f64, v: f64 },
    /// Normal scale mixture: `psi_j ~ InvGamma(nu, q)` marginalizes the
    /// components to Student-t with `2*nu` degrees of freedom and squared
    /// scale `q/nu` (slab) or `r*q/nu` (spike).
    Nmig { r: f64, nu: f64, q: f64 },
}

impl ContinuousSpike {
    pub fn r(&self) -> f64 {
        match *self {
            ContinuousSpike::Ssvs { r, .. } => r,
            ContinuousSpike::Nmig { r, .. } => r,
        }
    }

    fn validate(&self) -> Result<()> {
        let r = self.r();
        require_finite_positive("r", r)?;
        if r >= 1.0 {
            return Err(Error::InvalidHyperparameter {
                name: "r",
                value: r,
                constraint: "must lie in (0, 1)",
            });
        }
        if r > 0.01 {
            // The spike stops acting like one long before r reaches 1; the
            // selection-threshold interpretation assumes r << 1.
            log::warn!("variance ratio r = {r} is large; spike and slab overlap heavily");
        }
        match *self {
            ContinuousSpike::Ssvs { v, .. } => require_finite_positive("V", v),
            ContinuousSpike::Nmig { nu, q, .. } => {
                require_finite_positive("nu", nu)?;
                require_finite_positive("Q", q)
            }
        }
    }
}

/// Slab choices for the point-mass (Dirac) spike. Each fixes the prior
/// covariance `A_0` of the included effects, conditionally on `sigma^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiracSlab {
    /// `A_0 = c * I`: effects independent a priori.
    Independence { c: f64 },
    /// Zellner's prior, `A_0 = g * (X'X)^{-1}` on the selected columns.
    GPrior { g: f64 },
    /// Fractional prior built from a `b`-fraction of the likelihood, centered
    /// at the least-squares estimate with `A_0 = (1/b) * (X'X)^{-1}`.
    Fractional { b: f64 },
}

impl DiracSlab {
    fn validate(&self) -> Result<()> {
        match *self {
            DiracSlab::Independence { c } => require_finite_positive("c", c),
            DiracSlab::GPrior { g } => require_finite_positive("g", g),
            DiracSlab::Fractional { b } => {
                require_finite_positive("b", b)?;
                if b >= 1.0 {
                    return Err(Error::InvalidHyperparameter {
                        name: "b",
                        value: b,
                        constraint: "must lie in (0, 1)",
                    });
                }
                Ok(())
            }
        }
    }
}

/// Spike family: continuous (SSVS or NMIG) or point mass with a slab.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorFamily {
    Continuous(ContinuousSpike),
    Dirac(DiracSlab),
}

/// `omega ~ Beta(a, b)`; `a = b = 1` is uniform. A fixed omega is the
/// degenerate case handled by callers that need it (none here: the samplers
/// always draw omega).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaPrior {
    pub a: f64,
    pub b: f64,
}

impl Default for OmegaPrior {
    fn default() -> Self {
        Self { a: 1.0, b: 1.0 }
    }
}

impl OmegaPrior {
    fn validate(&self) -> Result<()> {
        require_finite_positive("a_omega", self.a)?;
        require_finite_positive("b_omega", self.b)
    }
}

/// Complete prior specification for one fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorSpec {
    pub family: PriorFamily,
    pub omega: OmegaPrior,
}

impl PriorSpec {
    pub fn new(family: PriorFamily, omega: OmegaPrior) -> Result<Self> {
        let spec = Self { family, omega };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.family {
            PriorFamily::Continuous(spike) => spike.validate()?,
            PriorFamily::Dirac(slab) => slab.validate()?,
        }
        self.omega.validate()
    }
}

fn require_finite_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidHyperparameter {
            name,
            value,
            constraint: "must be finite and positive",
        })
    }
}
