use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("{what}: argument {value} outside the function domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{what} did not converge; last bracket [{lo}, {hi}]")]
    NoConvergence { what: &'static str, lo: f64, hi: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("observation {index} = {value} is not strictly inside (0, 1)")]
    DataPoint { index: usize, value: f64 },

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("models are not nested: {0}")]
    NotNested(String),

    #[error("{what} diverges: {detail}")]
    Divergent { what: &'static str, detail: String },

    #[error("non-finite function value at coordinate {coordinate}")]
    NonFinite { coordinate: usize },
}
