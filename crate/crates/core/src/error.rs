use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter-domain error: {0}")]
    ParameterDomain(String),

    #[error("empty support: {0}")]
    EmptySupport(String),

    #[error("taxonomy-load error in category '{category}': {reason}")]
    TaxonomyLoad { category: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {}: {reason}", path.display())]
    Parse { path: PathBuf, reason: String },

    #[error("simulation-diverged at t = {t_s:.4} s")]
    SimulationDiverged { t_s: f64 },

    #[error("unknown recipe version '{0}'")]
    UnknownVersion(String),

    #[error("malformed field: {0}")]
    MalformedField(String),

    #[error("infeasible dataset plan: {0}")]
    Infeasible(String),

    #[error("insufficient {pool} pool: need {needed}, have {available}")]
    InsufficientPool {
        pool: &'static str,
        needed: usize,
        available: usize,
    },

    #[error("unknown color ({0}, {1}, {2})")]
    UnknownColor(u8, u8, u8),

    #[error("unknown pixel class '{0}'")]
    UnknownClass(String),

    #[error("label {label} lies outside both class sets (size {size})")]
    LabelOutOfRange { label: usize, size: usize },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, reason: impl ToString) -> Self {
        Error::Parse {
            path: path.into(),
            reason: reason.to_string(),
        }
    }
}
