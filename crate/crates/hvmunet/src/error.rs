use thiserror::Error;

/// Recoverable failures: IO, configuration, data, checkpoints. Shape and
/// wiring violations inside the tensor engine panic instead; they are
/// programming errors, not conditions to handle.
#[derive(Debug, Error)]
pub enum Error {
    #[error("op: {0}")]
    Op(String),
    #[error("config: {0}")]
    Config(String),
    #[error("data: {0}")]
    Data(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("train: {0}")]
    Train(String),
    #[error("verification: {0}")]
    Verification(String),
    #[error("{path}: {source}")]
    IoAt {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn io_at(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::IoAt {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
