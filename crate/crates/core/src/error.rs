use std::path::PathBuf;

/// Every failure the toolkit reports.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("schema error in instance `{instance}`: {message}")]
    Schema { instance: String, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("rle codec error: {0}")]
    Codec(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("degenerate annotation: {0}")]
    Degenerate(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("unresolved instance ids: {}", .0.join(", "))]
    Join(Vec<String>),

    #[error("invalid figure spec: {0}")]
    Spec(String),

    #[error("io error on {}: {source}", path.display())]
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
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
