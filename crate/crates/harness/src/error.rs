use std::path::PathBuf;

use specnet_core::SpectralError;
use thiserror::Error;

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: row {row}, column {column}: '{text}' is not a number", path.display())]
    Number {
        path: PathBuf,
        row: usize,
        column: usize,
        text: String,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("invalid config: {0}")]
    Config(String),

    #[error("stage {index} ({label}): {source}")]
    Stage {
        index: usize,
        label: String,
        #[source]
        source: SpectralError,
    },

    #[error("planner predicted {predicted} transforms but the run performed {measured}")]
    CountMismatch { predicted: usize, measured: usize },

    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
