use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot resolve {0}")]
    Resolution(String),
    #[error("embedding provider error: {0}")]
    Provider(String),
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("completion client error: {0}")]
    Client(String),
    #[error("budget too small: {item} needs {needed} words, limit is {limit}")]
    BudgetTooSmall {
        item: String,
        needed: usize,
        limit: usize,
    },
}

impl Error {
    /// Errors caused by bad inputs or settings rather than a failing run.
    pub fn is_user_error(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::Validation(_)
                | Error::Config(_)
                | Error::Resolution(_)
                | Error::BudgetTooSmall { .. }
        )
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::Validation(_) => "ValidationError",
            Error::Config(_) => "ConfigError",
            Error::Resolution(_) => "ResolutionError",
            Error::Provider(_) => "ProviderError",
            Error::DimMismatch { .. } => "DimMismatch",
            Error::Client(_) => "ClientError",
            Error::BudgetTooSmall { .. } => "BudgetTooSmall",
        }
    }
}

/// Every violation found while validating a document, not just the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationError {
    pub violations: Vec<String>,
}

impl ValidationError {
    pub fn new(violations: Vec<String>) -> Self {
        Self { violations }
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "validation failed: {}", self.violations.join("; "))
    }
}

impl core::error::Error for ValidationError {}
