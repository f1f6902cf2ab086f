use std::fmt;

/// Library-wide error type. The CLI maps variants onto its exit-code
/// contract: `Input` -> 2, `Budget` -> 3, `Internal` -> 2 with a loud
/// message (internal errors indicate a broken invariant, not bad input).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Malformed input: bad file syntax, mismatched shapes, violated
    /// preconditions. Parse errors carry a line number in the message.
    Input(String),
    /// An enumeration or search exceeded its budget; the caller may retry
    /// with a larger budget or switch method.
    Budget(String),
    /// An invariant the library is supposed to maintain failed. Never
    /// expected on valid inputs.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Input(m) => write!(f, "input error: {m}"),
            Error::Budget(m) => write!(f, "budget exceeded: {m}"),
            Error::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn budget_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Budget(msg.into()))
}
