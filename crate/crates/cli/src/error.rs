use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error(transparent)]
    Computation(#[from] qspectra::Error),

    #[error("{0}")]
    Check(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Computation(_) | CliError::Check(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Validation(_) => "validation",
            CliError::Computation(_) | CliError::Check(_) => "computation",
            CliError::Io { .. } => "io",
        }
    }

    /// Single-line, tab-free description for stderr:
    /// `error kind=<kind> code=<exit code> message="<text>"`.
    pub fn machine_line(&self) -> String {
        let message = self.to_string().replace('\\', "\\\\").replace('"', "\\\"").replace('\n', " ");
        format!("error kind={} code={} message=\"{}\"", self.kind(), self.exit_code(), message)
    }
}

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub type CliResult<T> = Result<T, CliError>;
