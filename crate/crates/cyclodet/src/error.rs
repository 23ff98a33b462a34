use thiserror::Error;

/// Names the block family a detector was factorizing when it failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockFamily {
    /// Antenna-sized blocks of the surveillance quadrant.
    SurveillanceAntenna,
    /// Stack-sized blocks of the reference quadrant.
    ReferenceStack,
    /// Double-stack blocks of the interleaved covariance.
    InterleavedStack,
}

impl std::fmt::Display for BlockFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BlockFamily::SurveillanceAntenna => write!(f, "surveillance antenna-block"),
            BlockFamily::ReferenceStack => write!(f, "reference stack-block"),
            BlockFamily::InterleavedStack => write!(f, "interleaved stack-block"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix dimension {dim} is not divisible into blocks of size {block_size}")]
    IndivisibleBlocks { dim: usize, block_size: usize },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("{family} {index} is not positive definite")]
    BlockNotPositiveDefinite { family: BlockFamily, index: usize },

    #[error("snapshot batch is empty")]
    EmptyBatch,

    #[error("zero-power input: {0}")]
    ZeroPower(String),

    #[error("insufficient trials: {trials} trials cannot resolve pfa {min_pfa} (need at least {needed})")]
    InsufficientTrials {
        trials: usize,
        min_pfa: f64,
        needed: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
