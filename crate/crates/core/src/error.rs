use alloc::string::String;
use core::fmt;

use num_complex::Complex64;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violates an operation's precondition.
    InvalidArgument(String),
    /// Coefficient index past the truncation order.
    OutOfRange { index: usize, order: usize },
    /// Logarithm of a zero or negative quantity.
    UndefinedValue(String),
    /// An exhaustive enumeration would exceed its guard.
    ResourceLimit { required: u128, limit: u128 },
    /// The coefficient table does not reach the requested `v`.
    Coverage { missing_v: u32 },
    /// Root-test window needs more terms than the table provides.
    Window { needed: usize, available: usize },
    /// A base configuration places entries outside its declared support.
    Validation(String),
    /// Quadrature did not settle before the node cap.
    ToleranceNotMet { best: Complex64, error: f64, nodes: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::OutOfRange { index, order } => {
                write!(f, "coefficient index {index} beyond truncation order {order}")
            }
            Error::UndefinedValue(msg) => write!(f, "undefined value: {msg}"),
            Error::ResourceLimit { required, limit } => {
                write!(f, "enumeration of {required} cases exceeds the limit {limit}")
            }
            Error::Coverage { missing_v } => {
                write!(f, "coefficient table does not cover v = {missing_v}")
            }
            Error::Window { needed, available } => write!(
                f,
                "root-test window needs {needed} terms but only {available} are available"
            ),
            Error::Validation(msg) => write!(f, "validation failed: {msg}"),
            Error::ToleranceNotMet { best, error, nodes } => write!(
                f,
                "quadrature tolerance not met with {nodes} nodes (best {best}, error estimate {error:e})"
            ),
        }
    }
}

impl core::error::Error for Error {}
