//! Error type shared by all modules.
//!
//! Domain errors carry the violated condition as data so that scan reports
//! can distinguish "bound inapplicable here" from "bound violated here".

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An evaluation point fell outside the domain of the function.
    #[error("argument out of domain: {what} = {value} not in {domain}")]
    OutOfDomain {
        what: &'static str,
        value: String,
        domain: &'static str,
    },

    /// A dimension or degree exceeded a documented cap.
    #[error("cap exceeded: {what} = {value}, cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    /// A bound's precondition does not hold at the given parameters.
    /// The condition string names the inequality that failed.
    #[error("precondition violated: {condition}")]
    Precondition { condition: String },

    /// Slice has volume zero; its barycenter is undefined.
    #[error("empty slice: volume fraction is zero")]
    EmptySlice,

    /// Halfspace description is degenerate (zero direction, length mismatch).
    #[error("invalid halfspace: {0}")]
    InvalidHalfspace(String),

    /// Inverse problem target cannot be met (outside achievable range).
    #[error("target out of achievable range: {0}")]
    TargetOutOfRange(String),

    /// Iterative solver failed to reach tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: u32, residual: f64 },

    /// Malformed textual input (rational literals, vectors, ranges).
    #[error("parse error: {0}")]
    Parse(String),

    /// Report emission failure.
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
