use thiserror::Error;

/// Errors produced by the estimators, samplers and file readers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is rank deficient: numerical rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("region of interest is empty")]
    EmptyRoi,

    #[error("insufficient samples: need at least {needed}, found {found}")]
    InsufficientSamples { needed: usize, found: usize },

    #[error("noise level {sigma} must be smaller than the reach {reach}")]
    SigmaExceedsReach { sigma: f64, reach: f64 },

    #[error("projection is ambiguous (point lies near the medial axis)")]
    AmbiguousProjection,

    #[error("velocity is (nearly) normal to the new tangent space; cannot transport")]
    DegenerateTransport,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
