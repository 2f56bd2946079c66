use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Integer arithmetic would leave the supported norm range.
    #[error("overflow: {0}")]
    Overflow(String),

    /// A real-valued argument is outside its domain.
    #[error("{name} = {value} is outside {domain}")]
    Range {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// A caller-side precondition was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Input failed validation (non-unitary matrix, zero vector, ...).
    #[error("invalid input: {0}")]
    Validation(String),

    /// The requested computation exceeds a configured resource budget.
    #[error("budget exceeded: {what} needs {requested}, limit is {limit}")]
    Budget {
        what: &'static str,
        requested: u128,
        limit: u128,
    },

    /// Two independently computed sets disagree.
    #[error("mismatch: {0}")]
    Mismatch(String),

    /// An invariant that the mathematics guarantees did not hold.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn range(name: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Range {
            name,
            value,
            domain,
        }
    }
}
