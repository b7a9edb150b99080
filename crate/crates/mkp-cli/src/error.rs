use mkp_core::Error as CoreError;

/// CLI-level error, carrying the process exit code.
///
/// * exit 2 — invalid configuration (unreadable/unparsable config, unknown
///   keys, parameter or grid validation failures, malformed flags);
/// * exit 3 — numerical degeneracy (singular seed or denominator) or I/O
///   failure while writing artifacts;
/// * exit 1 — a verification check failed (the report is still written).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidParams(_) | CoreError::AxisTooShort { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Numeric(format!("i/o error: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
