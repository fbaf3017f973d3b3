use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("normalized CFO {0} is outside (-1/2, 1/2)")]
    CfoOutOfRange(f64),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("matrix is numerically singular or not positive definite (pivot {pivot} at row {row})")]
    Singular { row: usize, pivot: f64 },

    #[error("underdetermined fit: {available} observations for {unknowns} unknowns")]
    Underdetermined { available: usize, unknowns: usize },

    #[error("LDPC construction: {0}")]
    Code(String),

    #[error("config parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Wraps an error with the frame/block it came from.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        Err(Error::LengthMismatch { expected, actual })
    } else {
        Ok(())
    }
}

pub(crate) fn check_cfo(eps: f64) -> Result<()> {
    if eps.is_finite() && eps.abs() < crate::MAX_ABS_CFO {
        Ok(())
    } else {
        Err(Error::CfoOutOfRange(eps))
    }
}
