use std::io;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot lay out word {word:?}: {side}px cell is smaller than its {grid}x{grid} grid")]
    LayoutInfeasible { word: String, side: u32, grid: u32 },

    #[error("token {0:?} is not in the vocabulary")]
    OutOfVocabulary(String),

    #[error("class index {index} out of range for vocabulary of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("image error: {0}")]
    Image(String),

    #[error("classifier transport error: {0}")]
    Transport(String),

    #[error("classifier protocol error: {0}")]
    Protocol(String),

    #[error("classifier did not answer within {0:?}")]
    Timeout(std::time::Duration),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures raised while talking to a classifier.
    pub fn is_classifier_failure(&self) -> bool {
        matches!(
            self,
            Error::Transport(_)
                | Error::Protocol(_)
                | Error::Timeout(_)
                | Error::IndexOutOfRange { .. }
        )
    }
}
