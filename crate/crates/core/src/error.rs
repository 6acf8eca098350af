use thiserror::Error;

/// Errors raised by geometry, spectra and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid interface: {0}")]
    InvalidInterface(String),

    #[error("degenerate parameterization at xi = {xi:?}: |x'| = {speed:e}")]
    DegenerateParameterization { xi: Vec<f64>, speed: f64 },

    #[error("outside collar: |t| = {t:e} >= reach {reach:e}")]
    OutsideCollar { t: f64, reach: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shell reaches origin: r - epsilon = {0:e} <= 0")]
    ShellReachesOrigin(f64),

    #[error("mode truncation: lambda_K = {lambda_k:e} is within 1% of the lowest eigenvalue {lambda_top:e} of mode l_max = {l_max}; increase l_max")]
    ModeTruncation { lambda_k: f64, lambda_top: f64, l_max: usize },

    #[error("problem too large: {unknowns} unknowns exceed cap {cap}")]
    TooManyUnknowns { unknowns: usize, cap: usize },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e}); {context}")]
    NotPositiveDefinite { pivot: usize, value: f64, context: String },

    #[error("eigensolver did not converge after {iterations} iterations; residuals {residuals:?}")]
    NoConvergence { iterations: usize, residuals: Vec<f64> },

    #[error("root bracketing failed: found {found} of {wanted} roots on grid [{grid_start:e}, {grid_end:e}] with {grid_points} points")]
    MissedRootBracket { found: usize, wanted: usize, grid_start: f64, grid_end: f64, grid_points: usize },

    #[error("eigenvalue {k} is not simple (cluster {first}..={last})")]
    NotSimple { k: usize, first: usize, last: usize },

    #[error("basis too small: {0}")]
    BasisTooSmall(String),

    #[error("rank-deficient design matrix: {0}")]
    RankDeficient(String),

    #[error("at epsilon = {epsilon}: {source}")]
    AtEpsilon { epsilon: f64, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
