use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("length error: needed {needed}, have {available}")]
    Length { needed: usize, available: usize },

    #[error("invalid learning process at t = {t}: {reason}")]
    InvalidSpec { t: usize, reason: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("infeasible design: {0}")]
    Infeasible(String),

    #[error("noise realization failed at t = {t}: slack {slack:e}")]
    Realization { t: usize, slack: f64 },

    #[error("design verification failed: achieved {achieved}, target {target}")]
    DesignVerification { achieved: f64, target: f64 },

    #[error("not converged: {0}")]
    Unconverged(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical failure.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Length { .. } | Error::InvalidSpec { .. } | Error::Validation(_))
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
