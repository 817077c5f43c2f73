use thiserror::Error;

/// Errors raised by the estimation, resampling and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty averaging window")]
    EmptyWindow,

    #[error("empty input")]
    EmptyInput,

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("block length {b} invalid for sample of length {n}")]
    InvalidBlock { b: usize, n: usize },

    #[error("block exceeds effective sample: b = {b}, m = {m}")]
    BlockExceedsSample { b: usize, m: usize },

    #[error("lag exceeds sample: |tau| = {tau} with n = {n}")]
    LagExceedsSample { tau: i64, n: usize },

    #[error("probability {0} outside (0, 1)")]
    InvalidProbability(f64),

    #[error("explosive coefficient: |mean| + |amp| = {0} >= 1")]
    ExplosiveCoefficient(f64),

    #[error("envelope is not real-valued")]
    NonRealEnvelope,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
