use thiserror::Error;

/// Errors raised by the numerical routines and bound calculators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {function}: {message}")]
    Domain {
        function: &'static str,
        message: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature did not converge: last estimates {previous} and {current} (delta {delta:e} > tolerance {tolerance:e})")]
    Quadrature {
        previous: f64,
        current: f64,
        delta: f64,
        tolerance: f64,
    },

    #[error("derivative of order {order} not available (max order {max_order})")]
    MissingDerivative { order: usize, max_order: usize },

    #[error("class membership check failed at w = {point:?}: {message}")]
    ClassMembership { point: Vec<f64>, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(function: &'static str, message: impl Into<String>) -> Error {
    Error::Domain {
        function,
        message: message.into(),
    }
}
