use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("compute error: {0}")]
    Compute(String),
    #[error("io error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn config(e: impl ToString) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn compute(e: impl ToString) -> Self {
        CliError::Compute(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
