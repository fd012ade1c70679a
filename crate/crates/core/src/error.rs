use thiserror::Error;

/// Errors raised across the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of a map or formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// The problem data violate a structural assumption.
    #[error("invalid problem: {0}")]
    InvalidSpec(String),

    /// Discretization or solver settings are unusable.
    #[error("configuration error: {0}")]
    Config(String),

    /// The assembled system is not symmetric positive definite.
    #[error("assembly error: {0}")]
    Assembly(String),

    /// The inputs to an analysis routine have the wrong shape.
    #[error("input error: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
