use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TauError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is singular to working precision")]
    SingularMatrix,

    #[error("matrix is not Hermitian (asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("non-finite value at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },

    #[error("recurrence lost positivity at n = {n} (h = {h:.3e})")]
    Conditioning { n: usize, h: f64 },

    #[error("point {0} lies on the support")]
    OnSupport(f64),

    #[error("no interval found where 4u - v'^2 >= 0")]
    EmptySupport,

    #[error("pole at {0}")]
    Pole(String),

    #[error("exponent 2*kappa = {0} is an integer (resonant Frobenius case)")]
    Resonance(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("matrix is not symplectic")]
    NotSymplectic,

    #[error("outside the domain: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, TauError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(TauError::InvalidArgument(msg.into()))
}
