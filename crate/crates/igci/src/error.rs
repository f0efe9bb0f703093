//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by density, inference, counting, and learning operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {left} bins on [{left_lo}, {left_hi}] vs {right} bins on [{right_lo}, {right_hi}]")]
    GridMismatch {
        left: usize,
        left_lo: f64,
        left_hi: f64,
        right: usize,
        right_lo: f64,
        right_hi: f64,
    },

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("insufficient data: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("oracle too large: k*l = {0} exceeds the enumeration bound 400")]
    OracleTooLarge(u64),

    #[error("lattice collision: rows {first} and {second} round to the same grid point")]
    LatticeCollision { first: usize, second: usize },

    #[error("extrapolation: y = {y} outside the labeled range [{lo}, {hi}]")]
    Extrapolation { y: f64, lo: f64, hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
