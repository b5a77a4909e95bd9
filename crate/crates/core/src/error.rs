use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty confusion matrix")]
    EmptyMatrix,
    #[error("invalid performance: {0}")]
    InvalidPerformance(String),
    #[error("invalid importance: {0}")]
    InvalidImportance(String),
    #[error("tile coordinate ({a}, {b}) is outside [0,1]^2")]
    CoordOutOfRange { a: f64, b: f64 },
    #[error("invalid priors: {0}")]
    InvalidPriors(String),
    #[error("invalid event nesting: {0}")]
    InvalidEvent(String),
    #[error("unknown score or ordering `{0}`")]
    UnknownScore(String),
    #[error("score `{0}` is reserved and has no implementation")]
    ReservedScore(String),
    #[error("ordering `{0}` needs class priors to be placed")]
    PriorsRequired(String),
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
