// SPDX-License-Identifier: Apache-2.0

//! Error type shared by all numerical routines.

use std::fmt;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid input parameter (wrong range, wrong length, ...).
    Parameter(String),
    /// Argument outside the mathematical domain of the operation.
    Domain(String),
    /// An iterative computation did not reach the requested accuracy.
    /// Carries the best estimate obtained (imaginary part zero for real
    /// quantities) and the estimated error of that value.
    Accuracy {
        what: String,
        best_re: f64,
        best_im: f64,
        estimate: f64,
    },
    /// A convergent denominator vanished at the evaluation point.
    Pole { index: usize },
    /// Two independent evaluation routes disagreed beyond tolerance.
    Inconsistent(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "parameter error: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Accuracy {
                what,
                best_re,
                best_im,
                estimate,
            } => write!(
                f,
                "accuracy error: {what} did not converge; best estimate {best_re}+{best_im}i (err ~ {estimate:.3e})"
            ),
            Error::Pole { index } => {
                write!(f, "pole error: convergent denominator vanished at n = {index}")
            }
            Error::Inconsistent(msg) => write!(f, "internal consistency error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
