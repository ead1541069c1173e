use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("word budget exceeded: {count} words > cap {cap}")]
    BudgetExceeded { count: u128, cap: usize },

    #[error("generator `{0}` is not of the form exp(a*z+b)+c with a != 0")]
    TemplateMismatch(String),

    #[error("target equals the omitted value {0}; the fiber is empty")]
    EmptyFiber(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("every periodicity sample overflowed")]
    InsufficientSamples,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config parse error at line {line}, column {column}: {message}")]
    ConfigParse { line: usize, column: usize, message: String },

    #[error("invalid config field `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image encoding failed: {0}")]
    Image(String),
}

impl Error {
    pub(crate) fn syntax(offset: usize, message: impl Into<String>) -> Self {
        Error::Syntax { offset, message: message.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), message: message.into() }
    }
}
