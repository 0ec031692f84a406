use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid numeric context: {0}")]
    InvalidContext(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),
    #[error("arity error: {0}")]
    Arity(String),
    #[error("resampling budget exhausted after {attempts} rejected draws")]
    ResampleExhausted { attempts: usize },
    #[error("invalid sample configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
