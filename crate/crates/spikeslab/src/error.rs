use thiserror::Error;

/// Errors surfaced by dataset construction, marginal-likelihood evaluation
/// and the MCMC samplers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: X has {x_rows} rows but y has length {y_len}")]
    DimensionMismatch { x_rows: usize, y_len: usize },

    #[error("need at least 2 observations and 1 regressor (got N={n}, d={d})")]
    TooSmall { n: usize, d: usize },

    #[error("column {column} has zero sample variance")]
    ZeroVarianceColumn { column: usize },

    #[error("column {column} is not centered (|sum| = {sum:.3e} exceeds tolerance {tol:.3e})")]
    NotCentered { column: usize, sum: f64, tol: f64 },

    #[error("invalid hyperparameter {name} = {value}: {constraint}")]
    InvalidHyperparameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("X_delta'X_delta is singular for delta = {delta:?}")]
    SingularDesign { delta: Vec<u8> },

    #[error("degenerate fit: posterior scale S_N = {s_n:.3e} is not positive")]
    DegenerateFit { s_n: f64 },

    #[error("fractional slab requires N >= d1 + 2 (got N={n}, d1={d1})")]
    TooFewObservations { n: usize, d1: usize },

    #[error("Cholesky factorization failed at iteration {iteration}")]
    NumericalBreakdown { iteration: usize },

    #[error("series of length {len} is too short (need at least {min})")]
    SeriesTooShort { len: usize, min: usize },

    #[error("delta has length {delta_len} but the dataset has {d} regressors")]
    DeltaLengthMismatch { delta_len: usize, d: usize },

    #[error("model space with d = {d} regressors is too large to enumerate (cap {cap})")]
    ModelSpaceTooLarge { d: usize, cap: usize },

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
