use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed record in an input file.
    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },
    /// Well-formed input that violates the data model.
    #[error("invalid data: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] fscale_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    /// True for failures caused by the content of input files rather than by
    /// the environment.
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::Parse { .. } | Error::Invalid(_) | Error::Json(_) => true,
            Error::Csv(e) => !matches!(e.kind(), csv::ErrorKind::Io(_)),
            Error::Core(e) => !matches!(e, fscale_core::Error::DimensionMismatch { .. }),
            Error::Io { .. } => false,
        }
    }

    pub fn is_dimension_mismatch(&self) -> bool {
        matches!(self, Error::Core(fscale_core::Error::DimensionMismatch { .. }))
    }
}
