use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure classes used to map errors onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed input files or bad configuration.
    Input,
    /// The model cannot produce the requested behavior.
    Model,
    /// A configured state or step cap was hit.
    Resource,
    /// Bad API arguments or broken internal invariants.
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("trace {trace}: event {event} has no \"concept:name\" attribute")]
    MissingActivity { trace: usize, event: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("row {row}: {message}")]
    Row { row: u64, message: String },
    #[error("structural error: {0}")]
    Structural(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("transition {0} is not enabled")]
    NotEnabled(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("candidate {candidate}: {source}")]
    Candidate {
        candidate: String,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Parse { .. }
            | Error::MissingActivity { .. }
            | Error::Config(_)
            | Error::Row { .. }
            | Error::Structural(_)
            | Error::Io(_) => ErrorClass::Input,
            Error::Model(_) => ErrorClass::Model,
            Error::Resource(_) => ErrorClass::Resource,
            Error::Argument(_) | Error::NotEnabled(_) | Error::Invariant(_) => ErrorClass::Internal,
            Error::Candidate { source, .. } => source.class(),
        }
    }
}
