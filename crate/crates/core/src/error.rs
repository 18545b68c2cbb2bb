use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: row {row}: {message}")]
    MalformedRow {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: row {row}: missing field `{field}`")]
    MissingField {
        path: PathBuf,
        row: usize,
        field: String,
    },

    #[error("{path}: header has no column `{field}`")]
    MissingColumn { path: PathBuf, field: String },

    #[error("duplicate record id `{id}`")]
    DuplicateId { id: String },

    #[error("record at position {position} has an empty id")]
    EmptyId { position: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot split: {0}")]
    Split(String),

    #[error("ranking name sets differ: only in first {only_a:?}, only in second {only_b:?}")]
    MismatchedRankings {
        only_a: Vec<String>,
        only_b: Vec<String>,
    },

    #[error("score for `{name}` is not finite")]
    NonFiniteScore { name: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
