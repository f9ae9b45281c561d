use thiserror::Error;

/// Errors raised by the arithmetic and verification routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A valuation or quotient could not be certified at the working precision.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// The input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An enumeration would exceed the configured element cap.
    #[error("resource limit: {what} needs {needed} elements, cap is {cap}")]
    ResourceLimit { what: String, needed: u128, cap: u128 },

    /// No vertex within the search depth is stabilized.
    #[error("no stabilized vertex within depth {0}")]
    NotStabilizable(u32),

    /// Malformed textual input or an invalid parameter combination.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precision(msg: impl Into<String>) -> Error {
    Error::PrecisionExhausted(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Default cap on enumerated elements; overridden by `GL2LAB_MAX_ELEMS`.
pub const DEFAULT_MAX_ELEMS: u128 = 2_000_000;

/// The enumeration cap in effect for this process.
pub fn max_elems() -> u128 {
    std::env::var("GL2LAB_MAX_ELEMS").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_MAX_ELEMS)
}

pub(crate) fn check_cap(what: &str, needed: u128) -> Result<()> {
    let cap = max_elems();
    if needed > cap {
        Err(Error::ResourceLimit { what: what.to_string(), needed, cap })
    } else {
        Ok(())
    }
}
