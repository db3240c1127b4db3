use std::io;
use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{}: unsupported format: {msg}", path.display())]
    Unsupported { path: PathBuf, msg: String },
    #[error(transparent)]
    Core(#[from] ridgesqueeze_core::Error),
}

impl Error {
    /// 0 ok, 2 configuration, 3 io or parse, 4 non-invertible.
    pub fn exit_code(&self) -> i32 {
        use ridgesqueeze_core::Error as C;
        match self {
            Error::Config(_) => 2,
            Error::Io { .. } | Error::Parse { .. } | Error::Unsupported { .. } => 3,
            Error::Core(C::NonInvertibleGrid(_)) => 4,
            Error::Core(_) => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
