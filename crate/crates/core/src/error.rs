use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// The variants split into two families that the CLI maps onto distinct exit
/// codes: specification problems (bad input, violated assumptions) and
/// numerical failures (samplers or factorizations that could not be built).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    Spec(String),

    #[error("argument {name} = {value} outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("bracket error: {0}")]
    Bracket(String),

    #[error("covariance is not positive semidefinite (largest jitter tried: {jitter:e})")]
    NotPositiveDefinite { jitter: f64 },

    #[error("sampler construction failed: {0}")]
    Sampler(String),

    #[error("classification indeterminate: {0}")]
    Indeterminate(String),

    #[error("dispatch error: {0}")]
    Dispatch(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: impl Into<String>) -> Self {
        Error::Domain {
            name,
            value,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotPositiveDefinite { .. } | Error::Sampler(_) | Error::Indeterminate(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
