//! Library side of the `hsfc` command-line tool: experiment configuration,
//! the replicated experiment driver, CSV schemas, and the convergence fit.
//! The binary in `main.rs` is a thin argument-parsing layer over this.

pub mod config;
pub mod experiment;
pub mod points_io;

/// Errors surfaced to the command line, carrying their exit code:
/// 2 for configuration problems, 3 for work-budget refusals, 1 otherwise.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("budget refusal: {0}")]
    Budget(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<hsfc::Error> for CliError {
    fn from(e: hsfc::Error) -> Self {
        match e {
            hsfc::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
