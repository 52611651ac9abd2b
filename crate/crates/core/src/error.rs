use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
