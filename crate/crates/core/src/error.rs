use crate::instance::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure modes shared by every solver entry point.
///
/// The CLI maps these onto its exit-code contract: usage and I/O problems
/// exit 2, `Infeasible` exits 3 and `Capacity` exits 4.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("capacity exceeded: {what} has size {size}, limit is {limit}")]
    Capacity { what: &'static str, size: usize, limit: usize },

    #[error("invalid instance: {}", summarize(.0))]
    InvalidInstance(Vec<Violation>),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }

    pub(crate) fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::InvalidInstance(_) | Error::Io(_) | Error::Json(_) => 2,
            Error::Infeasible(_) => 3,
            Error::Capacity { .. } => 4,
            Error::Internal(_) => 1,
        }
    }
}

fn summarize(violations: &[Violation]) -> String {
    const SHOWN: usize = 3;
    let mut parts: Vec<String> = violations.iter().take(SHOWN).map(|v| v.to_string()).collect();
    if violations.len() > SHOWN {
        parts.push(format!("and {} more", violations.len() - SHOWN));
    }
    parts.join("; ")
}
