use thiserror::Error;

use crate::amplitudes::PoleReport;
use crate::ComplexValue;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("gamma function pole at non-positive integer {0}")]
    PoleAtNonPositiveInteger(ComplexValue),

    #[error("pole at s = 1")]
    PoleAtOne,

    #[error("accuracy not reachable at s = {s}: {detail}")]
    AccuracyNotReachable { s: ComplexValue, detail: String },

    #[error("pole of {what} at {at}")]
    Pole { what: String, at: ComplexValue },

    #[error("{what} is within the pole guard ({magnitude:e})")]
    PoleGuard { what: String, magnitude: f64 },

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("{0} is not squarefree")]
    NotSquarefree(i64),

    #[error("invalid field parameter d = {0}")]
    InvalidField(i64),

    #[error("Q(sqrt({0})) is not a one-class field")]
    NotOneClass(i64),

    #[error("no solution of the norm equation for d = {d}, p = {p} within |y| <= {bound}")]
    SolverExhausted { d: i64, p: u64, bound: u64 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("value {value} on generator {generator} has order not dividing {order}")]
    InconsistentOrder {
        generator: u64,
        value: String,
        order: u64,
    },

    #[error("invalid character: {0}")]
    InvalidCharacter(String),

    #[error("parity violation: theta(-1) = {0} but must be 1")]
    ParityViolation(i32),

    #[error("character is not trivial on field units: {0}")]
    TrivialityViolation(String),

    #[error("unsupported character kind for this identity: {0}")]
    UnsupportedCharacterKind(String),

    #[error("invalid precision policy: {0}")]
    InvalidPolicy(String),

    #[error("amplitude pole: {0}")]
    AmplitudePole(PoleReport),

    #[error("non-finite value produced by {0}")]
    NonFinite(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for errors that mean "the test point sits on or near a singularity",
    /// as opposed to invalid input.
    pub fn is_pole_like(&self) -> bool {
        matches!(
            self,
            Error::PoleAtNonPositiveInteger(_)
                | Error::PoleAtOne
                | Error::Pole { .. }
                | Error::PoleGuard { .. }
                | Error::AmplitudePole(_)
        )
    }
}

pub(crate) fn finite(z: ComplexValue, what: &str) -> Result<ComplexValue> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}
