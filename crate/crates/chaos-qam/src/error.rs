//! Error type shared across the crate.

use std::fmt;

/// Everything that can go wrong in the library.
///
/// Functions on validated inputs are infallible and return values directly;
/// the fallible operations return `Result<_, Error>` with one of the variants
/// below.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A configuration value violated a documented bound. `detail` names the
    /// value and the bound, e.g. `p = -0.1 violates 0 <= p <= 1`.
    Parameter { name: &'static str, detail: String },
    /// A sample fell in a guard gap or beyond the outermost map region.
    /// `below`/`above` are the nearest region edges on either side of `x`
    /// (`None` when `x` lies past the first or last region).
    GapSample {
        x: f64,
        below: Option<f64>,
        above: Option<f64>,
    },
    /// A bit or sample sequence had an unusable shape (wrong length, empty).
    Framing { detail: String },
    /// A request exceeded a hard resource limit (e.g. exhaustive search size).
    Resource { detail: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter { name, detail } => {
                write!(f, "parameter error ({name}): {detail}")
            }
            Error::GapSample { x, below, above } => match (below, above) {
                (Some(b), Some(a)) => write!(
                    f,
                    "domain error: x = {x} lies in the guard gap between region edges {b} and {a}"
                ),
                (None, Some(a)) => {
                    write!(f, "domain error: x = {x} lies below the lowest region edge {a}")
                }
                (Some(b), None) => {
                    write!(f, "domain error: x = {x} lies above the highest region edge {b}")
                }
                (None, None) => write!(f, "domain error: x = {x} lies outside every region"),
            },
            Error::Framing { detail } => write!(f, "framing error: {detail}"),
            Error::Resource { detail } => write!(f, "resource error: {detail}"),
        }
    }
}

impl std::error::Error for Error {}
