//! Exit-code classification.

use std::fmt;

/// Process exit codes. Clap already exits with 2 on bad flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitKind {
    Usage = 2,
    Validation = 3,
    Io = 4,
    Network = 5,
}

#[derive(Debug)]
pub struct Failure {
    pub kind: ExitKind,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(kind: ExitKind, error: impl Into<anyhow::Error>) -> Self {
        Failure {
            kind,
            error: error.into(),
        }
    }

    pub fn usage(msg: impl fmt::Display) -> Self {
        Failure::new(ExitKind::Usage, anyhow::anyhow!("{msg}"))
    }

    pub fn validation(msg: impl fmt::Display) -> Self {
        Failure::new(ExitKind::Validation, anyhow::anyhow!("{msg}"))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Tags an error with its exit class and a short context line.
pub trait Classify<T> {
    fn or_exit(self, kind: ExitKind, context: impl fmt::Display) -> CliResult<T>;

    fn io_ctx(self, context: impl fmt::Display) -> CliResult<T>
    where
        Self: Sized,
    {
        self.or_exit(ExitKind::Io, context)
    }

    fn invalid_ctx(self, context: impl fmt::Display) -> CliResult<T>
    where
        Self: Sized,
    {
        self.or_exit(ExitKind::Validation, context)
    }

    fn net_ctx(self, context: impl fmt::Display) -> CliResult<T>
    where
        Self: Sized,
    {
        self.or_exit(ExitKind::Network, context)
    }
}

impl<T, E> Classify<T> for Result<T, E>
where
    E: std::error::Error + Send + Sync + 'static,
{
    fn or_exit(self, kind: ExitKind, context: impl fmt::Display) -> CliResult<T> {
        self.map_err(|e| Failure::new(kind, anyhow::Error::new(e).context(context.to_string())))
    }
}
