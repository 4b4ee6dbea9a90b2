use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("block multiplicities sum to {got}, expected the degree {expected}")]
    DegreeMismatch { expected: u32, got: u32 },

    #[error("degree {degree} exceeds the oracle limit {limit}")]
    OracleScale { degree: u32, limit: u32 },

    #[error("exponent q = {0} must be at least 1")]
    InvalidExponent(f64),

    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("the zero polynomial has no meaningful ratio")]
    ZeroPolynomial,

    #[error("empty support after resampling (density {0})")]
    EmptySupport(f64),

    #[error("malformed polynomial: {0}")]
    Malformed(String),

    #[error("exponent identity violated for m = {m}, M = {max_vars}: residual {residual:e}")]
    IdentityViolation { m: u32, max_vars: u32, residual: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
