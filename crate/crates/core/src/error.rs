use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    #[error("invalid UTF-8 at byte offset {offset}")]
    Utf8 { offset: usize },

    /// A malformed record in a TSV or M2 corpus.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A lexicon file violates one of its invariants.
    #[error("lexicon {name}, line {line}: {message}")]
    Lexicon {
        name: String,
        line: usize,
        message: String,
    },

    #[error("empty lexicon: {0}")]
    EmptyLexicon(String),

    #[error("invalid M2 record: {0}")]
    M2(String),

    #[error("edit script does not fit source: {0}")]
    Script(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("training failed: {0}")]
    Training(String),

    #[error("feature schema mismatch: model uses {model}, featurizer uses {expected}")]
    SchemaMismatch { model: String, expected: String },

    #[error("invalid model file: {0}")]
    Model(String),

    #[error("cannot build a 1:1 corpus: {0}")]
    Ratio(String),

    #[error("empty input: {0}")]
    Empty(String),

    #[error("hypothesis/gold mismatch: {0}")]
    Mismatch(String),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
