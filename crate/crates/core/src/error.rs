use std::fmt;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Where a data error was found.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Location {
    pub file: Option<String>,
    pub line: Option<u64>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.file, self.line) {
            (Some(file), Some(line)) => write!(f, "{file}:{line}: "),
            (Some(file), None) => write!(f, "{file}: "),
            (None, Some(line)) => write!(f, "line {line}: "),
            (None, None) => Ok(()),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Malformed or inconsistent input data.
    #[error("{location}{reason}")]
    Data { location: Location, reason: String },

    /// Bad invocation: unknown format, invalid configuration and the like.
    #[error("{0}")]
    Usage(String),

    /// A function was called outside of its mathematical domain.
    #[error("{0}")]
    Domain(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn data(reason: impl Into<String>) -> Self {
        Error::Data {
            location: Location::default(),
            reason: reason.into(),
        }
    }

    pub fn data_at(line: u64, reason: impl Into<String>) -> Self {
        Error::Data {
            location: Location {
                file: None,
                line: Some(line),
            },
            reason: reason.into(),
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Attaches a file name to a data error that does not carry one yet.
    pub fn in_file(self, file: impl fmt::Display) -> Self {
        match self {
            Error::Data {
                mut location,
                reason,
            } => {
                if location.file.is_none() {
                    location.file = Some(file.to_string());
                }
                Error::Data { location, reason }
            }
            other => other,
        }
    }

    /// Process exit code used by the command line: 1 for usage errors,
    /// 2 for data and I/O errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Data { .. } | Error::Domain(_) | Error::Io { .. } => 2,
        }
    }
}
