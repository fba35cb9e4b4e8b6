use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Model(#[from] infobound::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("non-finite value in `{0}`")]
    NaN(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl CliError {
    /// 1 for a failed scientific check, 2 for anything the caller must fix.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::CheckFailed(_) | CliError::NaN(_) => ExitCode::from(1),
            _ => ExitCode::from(2),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}
