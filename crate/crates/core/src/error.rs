use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical routines and their file front ends.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series of truncation order {order} is too short, need order >= {required}")]
    OrderTooLow { order: usize, required: usize },

    #[error("series must have a zero constant term, found {0}")]
    NonzeroConstant(Complex64),

    #[error("series must have a nonzero constant term")]
    ZeroConstant,

    #[error("weight parameter must be a finite real >= -1, got {0}")]
    InvalidWeight(f64),

    #[error("point {0} is not inside the open unit disk")]
    OutsideDisk(Complex64),

    #[error("degenerate conformal map: F'(0) = 0")]
    DegenerateMap,

    #[error("{what} did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergent {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("no interior grid points at spacing {0}")]
    EmptyMask(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
