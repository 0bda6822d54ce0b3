use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("solution length {got} does not match item count {expected}")]
    SolutionLength { expected: usize, got: usize },
    #[error("oracle guard exceeded: {0}")]
    OracleGuard(String),
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
