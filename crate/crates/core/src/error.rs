use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("the Levy density is not defined at x = 0")]
    DensityAtZero,

    #[error("threshold epsilon = {0} is not supported here (only epsilon = 1)")]
    UnsupportedThreshold(f64),

    #[error("quadrature did not converge ({context}): estimate {value:.6e}, error {error:.3e}")]
    Quadrature {
        context: String,
        value: f64,
        error: f64,
    },

    #[error("noise characteristic function is numerically zero at u = {u} (|cf| = {modulus:.3e})")]
    NearZeroDivision { u: f64, modulus: f64 },

    #[error("Gaussian deconvolution factor overflows at m = {m} (sigma^2 delta m^2 / 2 = {exponent:.1})")]
    GaussianOverflow { m: f64, exponent: f64 },

    #[error("cutoff m = {m} is below the admissible threshold pi/(2 epsilon) = {threshold}")]
    CutoffBelowThreshold { m: f64, threshold: f64 },

    #[error("optimal cutoff undefined: log n = {log_n:.4} does not exceed 4 lambda delta = {bound:.4}")]
    UndefinedCutoff { log_n: f64, bound: f64 },

    #[error("benchmark density has zero L2 norm on the grid")]
    ZeroBenchmark,

    #[error("estimate and benchmark are on different x grids")]
    GridMismatch,

    #[error("cutoff grid is empty (n = {0})")]
    EmptyGrid(usize),

    #[error("{failed} of {total} replications failed; first failure: {first}")]
    Replications {
        failed: usize,
        total: usize,
        first: String,
    },

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParams(_)
                | Error::DensityAtZero
                | Error::UnsupportedThreshold(_)
                | Error::CutoffBelowThreshold { .. }
                | Error::EmptyGrid(_)
                | Error::Parse(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
