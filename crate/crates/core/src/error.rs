use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range arguments.
    #[error("invalid input: {0}")]
    Input(String),

    /// A party attempted something the communication model forbids: acting
    /// on a qubit it does not hold, reading ground truth, or evaluating an
    /// observable it cannot know.
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    /// Operation issued in the wrong session phase.
    #[error("invalid state: {0}")]
    State(String),

    /// A construction that should always succeed did not.
    #[error("construction failed: {0}")]
    Construction(String),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("IO error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
