//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A pivoted factorization or orthogonalization ran out of rank.
    #[error("rank deficiency in {stage}: {detail}")]
    RankDeficient { stage: String, detail: String },

    /// Non-finite values were produced (overflow/underflow).
    #[error("numerical instability: {0}")]
    Instability(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("{origin}:{line}: matrix market format error: {msg}")]
    Format {
        origin: String,
        line: usize,
        msg: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("problem exceeds the dense evaluation budget: {0}")]
    BudgetExceeded(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn rank_deficient(stage: &str, detail: impl Into<String>) -> Self {
        Error::RankDeficient {
            stage: stage.to_string(),
            detail: detail.into(),
        }
    }

    /// Process exit code for the CLI: 2 for usage/config problems, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::DimensionMismatch(_)
            | Error::Format { .. }
            | Error::Config(_)
            | Error::Io(_) => 2,
            Error::RankDeficient { .. }
            | Error::Instability(_)
            | Error::Singular(_)
            | Error::BudgetExceeded(_) => 3,
        }
    }
}
