use std::path::PathBuf;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("archive nesting deeper than {max_depth} at {path}")]
    ArchiveDepth { path: PathBuf, max_depth: u32 },

    #[error("metadata file {path} is missing the mandatory `id` field")]
    MissingArxivId { path: PathBuf },

    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("CSV error in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("vocabulary is empty after document-frequency filtering; relax max_df/min_df")]
    EmptyVocabulary,

    #[error("number of topics must be at least 2, got {0}")]
    TooFewTopics(usize),

    #[error("sample size {requested} exceeds population size {population}")]
    SampleTooLarge { requested: usize, population: usize },

    #[error("predictions missing for labeled ids: {}", ids.join(", "))]
    MissingPredictions { ids: Vec<String> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Stage(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
