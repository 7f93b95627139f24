use thiserror::Error;

/// Errors surfaced by the library. The variants map onto the CLI exit codes:
/// parameter/input problems are configuration errors, `Capacity` means a norm
/// asked for more sketch than the instance was built with, and `Numeric`
/// covers solver failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("item {item} outside universe [1, {universe}]")]
    Range { item: u64, universe: u64 },

    #[error("norm `{norm}` needs mmc {needed:.3} but the sketch was sized for {cap:.3}")]
    Capacity { norm: String, needed: f64, cap: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("bad input: {0}")]
    Input(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
