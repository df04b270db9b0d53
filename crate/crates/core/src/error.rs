use thiserror::Error;

/// Errors raised by the simulator's public operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A subsystem label was duplicated or does not exist.
    #[error("labeling error: {0}")]
    Label(String),

    /// Dimensions do not line up (operator vs. targets, wrong subsystem size, ...).
    #[error("shape error: {0}")]
    Shape(String),

    /// A state or distribution is not normalized.
    #[error("normalization error: squared norm {0} differs from 1")]
    Normalization(f64),

    /// A physical model parameter is outside its admissible range.
    #[error("model error: {0}")]
    Model(String),

    /// Caller-supplied input is empty, non-finite, or otherwise unusable.
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
