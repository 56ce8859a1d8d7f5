use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("model validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("structural error: {0}")]
    Structure(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("missing cost-optimal record for horizon {0}; run the optimal pathway first")]
    MissingOptimum(i32),

    #[error("rank-deficient design; collinear categories: {}", .0.join(", "))]
    RankDeficient(Vec<String>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
