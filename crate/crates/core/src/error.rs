use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error in `{token}`: {message}")]
    Parse { token: String, message: String },

    #[error("{location}: {message}")]
    Input { location: String, message: String },

    #[error("unknown element `{0}`")]
    UnknownLabel(String),

    #[error("support violation: {0} is not below {1}")]
    Support(String, String),

    #[error("incompatible operands: {0}")]
    Incompatible(String),

    #[error("not invertible: {0}")]
    NonUnit(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("comparability graph is disconnected ({0} components)")]
    Disconnected(usize),

    #[error("weight system is not total: missing value for ({0}, {1})")]
    Totality(String, String),

    #[error("invalid weight system: {0}")]
    InvalidWeights(String),

    #[error("enumeration guard exceeded: {needed} candidates > limit {limit} (use force to override)")]
    Guard { needed: u128, limit: u128 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn parse(token: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { token: token.into(), message: message.into() }
    }

    pub(crate) fn input(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Input { location: location.into(), message: message.into() }
    }
}
