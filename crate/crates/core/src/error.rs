//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CopulaError>;

/// Everything that can go wrong while building models or running fits.
#[derive(Debug, Error)]
pub enum CopulaError {
    /// A parameter lies outside its family's domain. Carries the parameter
    /// name so config diagnostics can point at the offending field.
    #[error("parameter `{name}` out of domain: {detail}")]
    Domain { name: String, detail: String },

    /// A numerical routine failed to meet its contract (non-finite target,
    /// singular matrix, degenerate probability, ...).
    #[error("numerical failure in {context}: {detail}")]
    Numerical { context: String, detail: String },

    /// Configuration file problems: unreadable, unparsable, or inconsistent.
    #[error("config error: {0}")]
    Config(String),

    /// Data file problems. `line` is 1-based and includes the header.
    #[error("data error at line {line}: {detail}")]
    Data { line: usize, detail: String },

    /// A sampler invariant was violated mid-run; the chain is not usable.
    #[error("sampler invariant violated: {0}")]
    Invariant(String),

    /// A persisted chain file failed to parse. `line` is 1-based.
    #[error("chain file corrupt at line {line}: {detail}")]
    ChainParse { line: usize, detail: String },

    /// Summary requested from an empty or too-short record stream.
    #[error("insufficient sweeps: {0}")]
    Insufficient(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CopulaError {
    pub fn domain(name: &str, detail: impl Into<String>) -> Self {
        CopulaError::Domain { name: name.to_string(), detail: detail.into() }
    }

    pub fn numerical(context: &str, detail: impl Into<String>) -> Self {
        CopulaError::Numerical { context: context.to_string(), detail: detail.into() }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            CopulaError::Config(_) | CopulaError::Data { .. } | CopulaError::Domain { .. } => 2,
            CopulaError::Invariant(_) | CopulaError::Numerical { .. } => 3,
            CopulaError::ChainParse { .. } => 4,
            CopulaError::Insufficient(_) => 3,
            CopulaError::Io(_) => 2,
        }
    }
}
