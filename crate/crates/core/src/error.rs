use std::path::PathBuf;

/// Errors produced by the solver and its surrounding tooling.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unknown preset `{name}`; available presets: {available}")]
    UnknownPreset { name: String, available: String },
    #[error("divergence at step {step}: non-finite value at interior index {index:?}")]
    Divergence { step: usize, index: Vec<usize> },
    #[error("no interface found along the measurement ray")]
    NoInterface,
    #[error("circle has vanished: r0^2 + 2(1-d)t = {0} <= 0")]
    CircleVanished(f64),
    #[error("malformed field dump: {0}")]
    Format(String),
    #[error("i/o error on {path}: {source}")]
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
