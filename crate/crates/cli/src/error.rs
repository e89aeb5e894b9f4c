use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bacon::Error),

    #[error("config error: {0}")]
    Config(String),

    #[error("bad input: {0}")]
    Input(String),

    #[error("report endpoint: {0}")]
    Http(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        use bacon::Error as E;
        let code = match self {
            CliError::Core(E::NotConverged(_)) => 1,
            CliError::Core(E::Config(_)) | CliError::Config(_) => 3,
            CliError::Core(_) | CliError::Input(_) | CliError::Http(_) => 2,
        };
        ExitCode::from(code)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(bacon::Error::Io(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(bacon::Error::Json(e))
    }
}

pub type CliResult<T> = Result<T, CliError>;
