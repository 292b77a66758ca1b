use thiserror::Error;

/// Errors produced by the library.
///
/// Exit-code mapping for the CLI: [`Error::exit_code`] returns 1 for
/// configuration/validation problems and 2 for data problems
/// (parse failures, insufficient or misaligned data, numeric issues).
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("timestamps not strictly increasing at line {line}")]
    Ordering { line: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("series misaligned: {0}")]
    Alignment(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("numeric domain error: {0}")]
    NumericDomain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("timestamp out of supported range: {0}")]
    TimestampRange(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::Config(_) | Error::TimestampRange(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
