//! Error type shared across the crate.

use crate::HalfInt;

/// Errors surfaced by constructors and evaluators.
///
/// Numerical routines that *converge* report failure through these variants
/// rather than panicking; index arithmetic that would violate an algebraic
/// precondition (wrong parity, out-of-sector mode) is also funneled here so
/// callers can distinguish "bad input" from "bad numerics".
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A mode index had the wrong integrality for the requested sector
    /// (e.g. an integer index passed to a Neveu–Schwarz constructor).
    #[error("mode index {index} is invalid here: {reason}")]
    BadModeIndex { index: HalfInt, reason: String },

    /// A point lies outside the domain of the requested map
    /// (e.g. x = 0 or |x| = 1 for the real-line picture of β).
    #[error("point outside domain: {0}")]
    Domain(String),

    /// Interval endpoints out of order, overlapping, or touching ±1
    /// where the construction requires ±1 exterior.
    #[error("invalid interval family: {0}")]
    BadIntervals(String),

    /// An iterative routine failed to meet its tolerance.
    #[error("{what} did not converge: residual {residual:.3e} > tol {tol:.3e}")]
    NoConvergence {
        what: String,
        residual: f64,
        tol: f64,
    },

    /// Matrix dimensions incompatible with the requested operation.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Parse failure for half-integers or interval lists.
    #[error("parse error: {0}")]
    Parse(String),
}
