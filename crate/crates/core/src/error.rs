//! Error type shared by every fallible operation in the crate.

use alloc::string::String;
use core::fmt;

/// Failure raised by construction, validation, or solve entry points.
///
/// Numerical breakdown inside a solver is deliberately *not* an `Error`:
/// it is reported per entry through [`crate::solver::BatchSolveResult`]
/// so that one degenerate system cannot abort the rest of the batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A dimension argument was zero or inconsistent with the data length.
    InvalidDimension(String),
    /// Two objects that must agree in shape (systems, rows, length) do not.
    ShapeMismatch(String),
    /// A structural invariant of a batch format is violated.
    InvalidStructure(String),
    /// Jacobi setup found a missing or zero diagonal.
    SingularDiagonal { entry: usize, row: usize },
    /// A solver or tuning parameter is out of its documented domain.
    InvalidParameter(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDimension(msg) => write!(f, "invalid dimension: {msg}"),
            Error::ShapeMismatch(msg) => write!(f, "shape mismatch: {msg}"),
            Error::InvalidStructure(msg) => write!(f, "invalid structure: {msg}"),
            Error::SingularDiagonal { entry, row } => {
                write!(f, "zero or missing diagonal at entry {entry}, row {row}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
