use thiserror::Error;

/// Errors raised anywhere in the induction pipeline.
#[derive(Debug, Error)]
pub enum PsiError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid episode: {0}")]
    InvalidEpisode(String),

    #[error("no aligned {0} pairs under the given mapping")]
    EmptyAlignment(&'static str),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("placement failed after {attempts} attempts: {constraint}")]
    PlacementFailed { constraint: String, attempts: usize },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown problem id `{0}`")]
    UnknownProblem(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, PsiError>;
