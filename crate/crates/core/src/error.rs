//! Library-wide error type.

use thiserror::Error;

/// Errors produced by case handling, model building and solving.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("network validation failed:\n{0}")]
    InvalidNetwork(String),

    #[error("zone map is missing node `{0}`")]
    MissingZone(String),

    #[error("profile `{key}` not found for scenario `{scenario}`, year {year}")]
    MissingProfile {
        key: String,
        scenario: String,
        year: u32,
    },

    #[error("scenario data error: {0}")]
    Scenario(String),

    #[error("case schema error: {0}")]
    Schema(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("solver `{0}` is not available")]
    UnknownBackend(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("model is infeasible: {0}")]
    Infeasible(String),

    #[error("unsupported export format `{0}`")]
    UnsupportedFormat(String),

    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
