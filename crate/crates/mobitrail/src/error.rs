//! Crate-wide error type.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid coordinate ({lat}, {lon}): latitude must be in [-90, 90], longitude in [-180, 180)")]
    InvalidCoordinate { lat: f64, lon: f64 },

    #[error("invalid timestamp {0}: must be >= 0")]
    InvalidTimestamp(i64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("trace events belong to more than one user ({0} vs {1})")]
    MixedUsers(String, String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: missing or unreadable header row")]
    MissingHeader { path: PathBuf },

    #[error("{path} line {line}: {message}")]
    Malformed {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("consensus-country filter requires per-user consensus homes")]
    MissingConsensusHomes,

    #[error("assignment vectors cover different user sets")]
    UserSetMismatch,

    #[error("partition does not cover generated point ({lat}, {lon})")]
    PartitionCoverage { lat: f64, lon: f64 },

    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Process exit code for the CLI: 3 for I/O-level failures, 4 when a
    /// stage produced an empty result set, 2 for everything else (bad
    /// arguments, malformed data, invalid configuration).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::MissingHeader { .. } => 3,
            Error::EmptyInput(_) => 4,
            _ => 2,
        }
    }

    /// True when the error is a downstream consumer closing our output
    /// early (e.g. `mobitrail ... -o - | head`); the CLI treats that as a
    /// normal exit, like any well-behaved pipe citizen.
    pub fn is_broken_pipe(&self) -> bool {
        matches!(
            self,
            Error::Io { source, .. } if source.kind() == std::io::ErrorKind::BrokenPipe
        )
    }
}

pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
    Error::Io {
        path: path.into(),
        source,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_group_by_failure_kind() {
        let io_err = io("x.csv", std::io::Error::from(std::io::ErrorKind::NotFound));
        assert_eq!(io_err.exit_code(), 3);
        assert_eq!(Error::EmptyInput("no users".into()).exit_code(), 4);
        assert_eq!(Error::InvalidArgument("bad".into()).exit_code(), 2);
    }

    #[test]
    fn broken_pipe_is_recognized_only_on_io() {
        let pipe = io("-", std::io::Error::from(std::io::ErrorKind::BrokenPipe));
        assert!(pipe.is_broken_pipe());
        let other = io("-", std::io::Error::from(std::io::ErrorKind::NotFound));
        assert!(!other.is_broken_pipe());
        assert!(!Error::EmptyInput("x".into()).is_broken_pipe());
    }
}
