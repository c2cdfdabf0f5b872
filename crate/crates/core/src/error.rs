use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("generator index {index} outside 1..={rank}")]
    InvalidGenerator { index: i64, rank: u16 },
    #[error("rank must be in 2..=64, got {0}")]
    InvalidRank(u16),
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: u16, right: u16 },
    #[error("cannot parse word token {0:?}")]
    ParseWord(String),
    #[error("cannot parse algebra element line {line}: {reason}")]
    ParseElement { line: usize, reason: String },
    #[error("sphere of radius {radius} at rank {rank} has {count} words, above the guard {limit}")]
    SphereTooLarge { rank: u16, radius: usize, count: u128, limit: u128 },
    #[error("invalid state parameters: {0}")]
    InvalidState(String),
    #[error("word {0} appears twice in the Gram index set")]
    DuplicateWord(String),
    #[error("matrix is not Hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("matrix dimension {dim} exceeds the limit {limit}")]
    TooLarge { dim: usize, limit: usize },
    #[error("Jacobi iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("lambda {lambda} outside the open interval (0, sqrt({rank}))")]
    LambdaOutOfRange { lambda: f64, rank: u16 },
    #[error("boundary prefix {0} too short to select a branch")]
    PrefixTooShort(String),
    #[error("integration depth {depth} needs {cylinders} cylinders, above the guard")]
    TooDeep { depth: usize, cylinders: u128 },
    #[error("point {0} is not on the unit circle")]
    ZeroNotOnCircle(String),
    #[error("point {0} is not a zero of the polynomial (|p(z)| = {1:e})")]
    NotARoot(String, f64),
    #[error("weights must be positive and sum to 1 (sum = {0})")]
    WeightsNotConvex(f64),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
