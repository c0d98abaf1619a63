use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value object would violate one of its invariants.
    #[error("invariant violated: {0}")]
    Invariant(String),

    /// A Bayes update was requested for an outcome the prior gives (numerically) zero weight.
    #[error("numerically degenerate update: outcome probability {probability:e}")]
    Degenerate { probability: f64 },

    /// An affine map sends part of the Bloch ball outside the ball.
    #[error("channel invalid: image norm {norm} exceeds 1")]
    ChannelInvalid { norm: f64 },

    /// Iterative solver gave up.
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// The Hessian at a supposed equilibrium is not positive definite.
    #[error("configuration is not a minimum: eigenvalue {eigenvalue:e}")]
    NotMinimum { eigenvalue: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
