use std::path::{Path, PathBuf};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] soundtaxel_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    /// A malformed input file; `at` is `line N`, `byte N` or a field path.
    #[error("{}: {at}: {msg}", path.display())]
    Format { path: PathBuf, at: String, msg: String },
    #[error("{0}")]
    Usage(String),
    /// A recomputed metric disagrees with the report.
    #[error("report check failed: {0}")]
    Mismatch(String),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.to_owned(), source }
    }

    pub fn format(path: &Path, at: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Format { path: path.to_owned(), at: at.into(), msg: msg.into() }
    }

    /// Process exit status: 2 for I/O failures, 1 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { .. } => 2,
            _ => 1,
        }
    }
}

pub(crate) trait IoContext<T> {
    fn at(self, path: &Path) -> Result<T>;
}

impl<T> IoContext<T> for std::io::Result<T> {
    fn at(self, path: &Path) -> Result<T> {
        self.map_err(|e| Error::io(path, e))
    }
}
