//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Boundary sequence is empty, non-positive, or not strictly increasing.
    #[error("invalid boundary sequence: {0}")]
    InvalidBoundary(String),

    /// A configuration (path family or edge orientation) violates a
    /// structural constraint of its domain.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A triangular array violates monotonicity, interlacing, or the
    /// triple-free condition.
    #[error("invalid triangle: {0}")]
    InvalidTriangle(String),

    /// Formula parameters hit a zero denominator; the closed form is not
    /// defined there.
    #[error("formula undefined: {0}")]
    FormulaDomain(String),

    /// A resource cap was exceeded. The CLI maps this to exit code 2.
    #[error("resource cap exceeded: {what} would exceed {cap}")]
    CapExceeded { what: &'static str, cap: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
