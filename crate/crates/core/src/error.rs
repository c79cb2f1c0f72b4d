use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: no valid records")]
    EmptyCorpus { path: PathBuf },

    #[error("{path}:{line}: {detail}")]
    Parse {
        path: PathBuf,
        line: usize,
        detail: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("vocabulary for group {group} is empty after filtering")]
    EmptyVocabulary { group: String },

    #[error("unknown group {0:?}")]
    UnknownGroup(String),

    #[error("group {group} has a single word; cannot draw a corruption")]
    CannotCorrupt { group: String },

    #[error("word {word:?} is not in the vocabulary of group {group}")]
    Lookup { word: String, group: String },

    #[error("index {index} out of range for group {group} (size {size})")]
    IndexOutOfRange {
        group: String,
        index: usize,
        size: usize,
    },

    #[error("non-finite value in sub-network {subnet}: {detail}")]
    Numeric { subnet: String, detail: String },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("need at least {needed} usable items, got {got}")]
    InsufficientItems { needed: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
