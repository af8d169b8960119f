use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("{context}: quadrature did not converge ({detail})")]
    Convergence { context: String, detail: String },

    #[error("sequence acceleration did not converge: estimate {estimate}, column disagreement {error:.3e}")]
    NotAccelerated { estimate: Complex64, error: f64 },

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("hypotheses not satisfied: {0}")]
    Ineligible(String),

    #[error("missing data: {0}")]
    Missing(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
