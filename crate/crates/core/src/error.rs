use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degree {degree} exceeds the configured cap {cap}")]
    DegreeCapExceeded { degree: u128, cap: u128 },

    #[error("{what} = {value} exceeds the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: u128,
        cap: u128,
    },

    /// Exact division left a remainder; `index` is the first coefficient
    /// (ascending degree) where it showed up.
    #[error("polynomial is not divisible: nonzero remainder at coefficient {index}")]
    NonDivisible { index: usize },

    /// An interpolated polynomial had a nonzero coefficient beyond its
    /// proven degree bound.
    #[error("degree bound violated: {0}")]
    BoundViolated(String),

    #[error("intermediate magnitude {magnitude:e} exceeded the overflow threshold")]
    Overflow { magnitude: f64 },

    #[error("no convergence after {iterations} iterations (worst correction {worst_correction:e})")]
    NoConvergence {
        iterations: usize,
        worst_correction: f64,
    },

    #[error("bisection failed: {0}")]
    BisectionFailed(String),

    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),

    #[error("parameter {0} is not in the main hyperbolic component")]
    NotInH1(Complex64),

    #[error("non-finite integrand at grid node {index}")]
    NonFiniteNode { index: usize },

    #[error("non-finite Laplacian stencil at grid node {index}")]
    NonFiniteStencil { index: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
