use std::path::PathBuf;

use thiserror::Error;

/// Failures raised by [`crate::env::BanditEnvironment`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("horizon of {horizon} pulls is exhausted")]
    BudgetExhausted { horizon: u64 },

    /// The remaining budget was smaller than the requested batch. The
    /// remaining pulls were still spent on the arm, so the environment is at
    /// its horizon when this is returned.
    #[error("budget truncated: {performed} of {requested} pulls performed")]
    Truncated {
        performed: u64,
        requested: u64,
        empirical_mean: Option<f64>,
    },

    #[error("arm {index} is not accessible (dropped, passed over, or never arrived)")]
    StaleHandle { index: usize },

    #[error("batch size must be at least one pull")]
    EmptyBatch,
}

impl EnvError {
    /// True for the two variants meaning "the horizon has been reached".
    pub fn is_out_of_budget(&self) -> bool {
        matches!(
            self,
            EnvError::BudgetExhausted { .. } | EnvError::Truncated { .. }
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parameter tower overflows 64-bit integers at level {level}")]
    TowerOverflow { level: u32 },

    #[error(transparent)]
    Env(#[from] EnvError),

    #[error("aggregation error: {0}")]
    Aggregation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
