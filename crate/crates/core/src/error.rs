use thiserror::Error;

/// Errors raised by the simulator and the trajectory analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A Kraus set that does not satisfy `sum K^dagger K = I`.
    #[error("invalid channel: {0}")]
    ChannelInvalid(String),

    #[error("not a valid quantum state: {0}")]
    NotAState(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("phase shift undetectable: {0}")]
    UndetectableShift(String),

    /// Numerical results that should be impossible for valid inputs,
    /// e.g. a Pauli expectation with a large imaginary part.
    #[error("internal consistency: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
