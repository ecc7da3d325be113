use std::io;
use std::path::PathBuf;

use ssl_forge_core::ErrorKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("cannot read `{}`: {source}", path.display())]
    Read { path: PathBuf, source: io::Error, kind: ErrorKind },
    #[error("cannot write `{}`: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Core(#[from] ssl_forge_core::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Config,
            Error::Data(_) | Error::Write { .. } => ErrorKind::Data,
            Error::Read { kind, .. } => *kind,
            Error::Core(e) => e.kind(),
        }
    }

    /// 2 for configuration errors, 3 for data errors, 4 for algorithm failures.
    pub fn exit_code(&self) -> i32 {
        exit_code(self.kind())
    }
}

pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Config => 2,
        ErrorKind::Data => 3,
        ErrorKind::Algorithm => 4,
    }
}
