use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// A value that parsed but makes no sense; `field` is a dotted path such
    /// as `algorithm[2].dcd.nu`.
    #[error("invalid config at `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("cannot parse {}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{}:{line}: {reason}", path.display())]
    ChannelFile {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Filter(#[from] robust_dcd::Error),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

pub(crate) fn config_err(field: impl Into<String>, reason: impl Into<String>) -> LabError {
    LabError::Config {
        field: field.into(),
        reason: reason.into(),
    }
}

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> LabError {
    let path = path.into();
    move |source| LabError::Io { path, source }
}
