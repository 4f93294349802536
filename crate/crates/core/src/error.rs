use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("inconsistent counts: {0}")]
    InconsistentCounts(String),

    #[error("invalid event stream: {0}")]
    InvalidStream(String),

    #[error("bisection bracket invalid: {0}")]
    Boundary(String),

    #[error("need at least 2 blocks for a sigma estimate, got {0}")]
    TooFewBlocks(usize),

    #[error("degenerate visibility: coincidence probabilities sum to zero")]
    DegenerateVisibility,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
