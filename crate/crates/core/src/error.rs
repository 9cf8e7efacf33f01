use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max asymmetry {max_asymmetry:e} exceeds {tolerance:e}")]
    NotHermitian { max_asymmetry: f64, tolerance: f64 },

    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})"
    )]
    NotConverged { sweeps: usize, residual: f64 },

    #[error("index k = {k} out of range 0..={n}")]
    IndexOutOfRange { k: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("unknown catalog function `{0}`")]
    UnknownFunction(String),

    #[error("profile has a kink at t = {t}; use the smoothed form for Hessian quantities")]
    AtKink { t: f64 },

    #[error("stencil of width {reach} around |z| = {radius} leaves the unit ball")]
    StencilOutsideBall { radius: f64, reach: f64 },

    #[error("operation requires a radial function, `{0}` is not radial")]
    NonRadial(String),

    #[error("integral diverges (asymptotic dyadic shell ratio {shell_ratio:.6})")]
    Divergent { shell_ratio: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
