use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in `{0}`")]
    NonFinite(&'static str),

    #[error("invalid `{field}`: {constraint}")]
    Invalid {
        field: &'static str,
        constraint: &'static str,
    },

    #[error("state became non-finite; last finite time {last_finite}")]
    Diverged { last_finite: f64 },

    #[error("quadrature did not reach tolerance (estimated error {achieved:e})")]
    Quadrature { achieved: f64 },

    #[error("fit failed: {0}")]
    Fit(&'static str),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, constraint: &'static str) -> Self {
        Error::Invalid { field, constraint }
    }
}

/// A run that stopped on the first non-finite state.
///
/// `partial` holds every sample up to and including `last_finite`.
#[derive(Debug, Clone, PartialEq)]
pub struct Diverged<T> {
    pub last_finite: f64,
    pub partial: T,
}

impl<T> From<Diverged<T>> for Error {
    fn from(d: Diverged<T>) -> Self {
        Error::Diverged {
            last_finite: d.last_finite,
        }
    }
}

pub(crate) fn ensure_finite(field: &'static str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(field))
    }
}
