//! Crate-wide error type and CLI exit-code mapping.

use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// No phase configuration can satisfy the communication constraint.
    #[error("infeasible scenario: {0}")]
    Infeasible(String),

    /// A requested aggregate reflection lies outside the reachable disk.
    #[error("nu out of range: |nu| = {magnitude} exceeds N*alpha2*alpha3 = {bound}")]
    NuOutOfRange { magnitude: f64, bound: f64 },

    /// Config-file syntax or validation failure.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// CLI exit code: 1 parse/validation, 2 infeasible, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Parse { .. } => 1,
            Error::Infeasible(_) | Error::NuOutOfRange { .. } => 2,
            Error::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
