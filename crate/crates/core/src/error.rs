use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value is missing or inconsistent.
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    /// The MME (or a scaled deployment) cannot keep up with the offered load.
    #[error(
        "overload: rho = {rho:.6} >= 1; capacity multiplier must exceed {min_multiplier:.6}"
    )]
    Overload { rho: f64, min_multiplier: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    /// The requested percentile lies where the tail approximation is clamped.
    #[error(
        "percentile {p} lies below the validity threshold of the tail approximation \
         (survival is clamped to 1 for tau < {threshold:.6e} s); use simulation instead"
    )]
    OutsideValidity { p: f64, threshold: f64 },

    #[error("input error: {0}")]
    Input(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
