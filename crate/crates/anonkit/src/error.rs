use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] anonkit_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    /// Malformed input file contents.
    #[error("{0}")]
    Format(String),
    /// Invalid configuration or flag combination.
    #[error("{0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for problems with the request itself rather than with running it.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Config(_) => true,
            Error::Core(e) => matches!(
                e,
                anonkit_core::Error::InvalidConfig(_)
                    | anonkit_core::Error::EmptyQuasiIdentifiers
                    | anonkit_core::Error::UnknownFeature(_)
                    | anonkit_core::Error::InvalidFractions(_)
                    | anonkit_core::Error::InvalidSecretFeature(_)
            ),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
