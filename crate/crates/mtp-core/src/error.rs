//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MtpError {
    #[error("cannot parse '{0}' as an exact rational")]
    BadNumber(String),

    #[error("parse error in {file}: {message}")]
    Parse { file: String, message: String },

    #[error("invalid input: {0}")]
    Usage(String),

    #[error("graph fails regularity conditions:\n{0}")]
    InvalidGraph(String),

    #[error("unknown hypothesis label '{0}'")]
    UnknownLabel(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
