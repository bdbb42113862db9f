//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

/// Errors reported by the library.
///
/// The three variants are deliberately coarse: callers (in particular the
/// command-line frontend) map them onto distinct exit codes, so what matters
/// is *why* an operation could not produce a value, not where it failed.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The request itself is malformed: inconsistent dimensions, an invalid
    /// base, a coordinate outside `[0,1)`, and so on.
    Argument(String),
    /// The computation was set up correctly but exceeded a configured search
    /// or memory budget before reaching a provably exact answer. When the
    /// aborted search already brackets the result, the interval is reported.
    ResourceLimit {
        what: String,
        /// Best enclosure `[lo, hi]` for the value at the point the search
        /// stopped, when one is known.
        bracket: Option<(f64, f64)>,
    },
    /// The combination of inputs is valid but unsupported, e.g. a weight
    /// with no closed-form tail sum used where one is required.
    Capability(String),
}

impl Error {
    pub fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    pub fn resource(what: impl Into<String>, bracket: Option<(f64, f64)>) -> Self {
        Error::ResourceLimit {
            what: what.into(),
            bracket,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Argument(msg) => write!(f, "invalid argument: {msg}"),
            Error::ResourceLimit { what, bracket } => {
                write!(f, "resource limit exceeded: {what}")?;
                if let Some((lo, hi)) = bracket {
                    write!(f, " (value bracketed in [{lo:.17e}, {hi:.17e}])")?;
                }
                Ok(())
            }
            Error::Capability(msg) => write!(f, "unsupported combination: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}

/// Convenient alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
