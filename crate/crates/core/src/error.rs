//! Error type shared by the library.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("no admissible candidate: {0}")]
    NoCandidate(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
