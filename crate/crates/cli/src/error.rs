use flb_core::FlbError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed input; the process exits with status 2.
    #[error("{0}")]
    Parse(String),
    /// A verification criterion failed; exit status 3.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Core(FlbError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl From<FlbError> for CliError {
    fn from(e: FlbError) -> Self {
        match e {
            FlbError::Parse { .. } => CliError::Parse(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

impl From<toml::de::Error> for CliError {
    fn from(e: toml::de::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Verification(_) => 3,
            _ => 1,
        }
    }
}
