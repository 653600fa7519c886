use std::path::PathBuf;

use crate::market::Phase;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical routine did not converge: {0}")]
    Convergence(&'static str),

    #[error("operation `{op}` not allowed in phase {found:?} (requires {expected})")]
    Phase {
        op: &'static str,
        expected: &'static str,
        found: Phase,
    },

    #[error("lifecycle error: {0}")]
    Lifecycle(String),

    #[error("contract infeasible: {0}")]
    ContractInfeasible(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{}:{line}: {reason}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("{}: at `{path}`: {reason}", file.display())]
    Schema {
        file: PathBuf,
        path: String,
        reason: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
