//! Crate-wide error type.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate instance id {id:?}")]
    DuplicateId { id: String },

    #[error("training instance {id:?} has no sense tag")]
    UnlabeledTrainInstance { id: String },

    #[error("training data is empty")]
    EmptyTrainingData,

    #[error("unknown part of speech {0:?} (expected one of n, v, a, p)")]
    InvalidPos(String),

    #[error("contingency table is inconsistent: {0}")]
    InvalidTable(String),

    #[error("{0}")]
    InvalidInput(String),

    #[error("feature vector has {got} bits but the model expects {expected}")]
    MisalignedVector { expected: usize, got: usize },

    #[error("prediction missing for instance {id:?}")]
    MissingPrediction { id: String },

    #[error("prediction for unknown instance {id:?}")]
    UnknownPrediction { id: String },

    #[error("task sets differ: {0}")]
    MismatchedTasks(String),

    #[error("task {word}-{pos}: {source}")]
    Task {
        word: String,
        pos: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps an error with the word/pos of the task it occurred in.
    pub fn in_task(self, word: &str, pos: &str) -> Self {
        Error::Task {
            word: word.to_string(),
            pos: pos.to_string(),
            source: Box::new(self),
        }
    }
}
