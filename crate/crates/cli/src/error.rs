use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{operation} failed: {source}")]
    Numerical {
        operation: &'static str,
        #[source]
        source: nonlocal_core::Error,
    },

    #[error("output error: {0}")]
    Output(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    /// Process exit status: 2 for configuration errors, 3 for numerical
    /// failures, 1 for output and I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical { .. } => 3,
            CliError::Output(_) | CliError::Io(_) => 1,
        }
    }
}

/// Tags a core error with the operation that raised it.
pub fn numerical(operation: &'static str) -> impl Fn(nonlocal_core::Error) -> CliError {
    move |source| CliError::Numerical { operation, source }
}
