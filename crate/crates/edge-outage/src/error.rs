use thiserror::Error;

/// Unified error type for the whole crate.
///
/// The CLI maps variants onto its exit-code contract: validation, domain, and
/// configuration problems exit 2; oracle budget overruns exit 3; design-search
/// ceilings exit 4.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration field violates its range or relationship constraints.
    #[error("invalid {field}: {message}")]
    Validation {
        field: &'static str,
        message: String,
    },

    /// An argument lies outside an operation's mathematical domain.
    #[error("{0}")]
    Domain(String),

    /// A placement scheme was combined with a request model it is not
    /// analyzed under (random placement pairs with uniform requests,
    /// most-popular placement with Zipf requests).
    #[error("{0}")]
    Configuration(String),

    /// An exact-oracle request exceeds its enumeration budget.
    #[error("{0}")]
    Budget(String),

    /// A search hit its ceiling without bracketing the answer.
    #[error("{0}")]
    Ceiling(String),
}

impl Error {
    pub(crate) fn validation(field: &'static str, message: impl Into<String>) -> Self {
        Error::Validation {
            field,
            message: message.into(),
        }
    }

    pub(crate) fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    pub(crate) fn configuration(message: impl Into<String>) -> Self {
        Error::Configuration(message.into())
    }

    pub(crate) fn budget(message: impl Into<String>) -> Self {
        Error::Budget(message.into())
    }

    pub(crate) fn ceiling(message: impl Into<String>) -> Self {
        Error::Ceiling(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
