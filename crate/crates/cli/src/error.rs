use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Domain(looptool::Error),
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("held-out values disagree at n = {0:?}")]
    Holdout(Vec<u64>),
    #[error("verification failed")]
    Verify,
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io { .. } | CliError::Verify => 1,
            CliError::Domain(_) => 2,
            CliError::CrossCheck(_) => 3,
            CliError::Singular(_) => 4,
            CliError::Holdout(_) => 5,
        }
    }
}

impl From<looptool::Error> for CliError {
    fn from(e: looptool::Error) -> Self {
        use looptool::Error as E;
        match e {
            E::Parse(m) => CliError::Parse(m),
            E::SingularSystem | E::SingularMatrix => CliError::Singular(e.to_string()),
            other => CliError::Domain(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
