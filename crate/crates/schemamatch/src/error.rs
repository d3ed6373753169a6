use std::fmt;
use std::path::PathBuf;

use schemamatch_core::Error;

/// Everything the command line can fail with, classified for exit codes.
#[derive(Debug)]
pub enum AppError {
    Engine(Error),
    /// An input file could not be read.
    Input { path: PathBuf, message: String },
    /// An output file could not be written.
    Output { path: PathBuf, message: String },
    Usage(String),
}

impl AppError {
    pub fn input(path: impl Into<PathBuf>, e: impl fmt::Display) -> Self {
        AppError::Input { path: path.into(), message: e.to_string() }
    }

    pub fn output(path: impl Into<PathBuf>, e: impl fmt::Display) -> Self {
        AppError::Output { path: path.into(), message: e.to_string() }
    }

    /// 1 for validation and configuration problems, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Engine(e) if e.is_user_error() => 1,
            AppError::Engine(_) => 2,
            AppError::Input { .. } | AppError::Usage(_) => 1,
            AppError::Output { .. } => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            AppError::Engine(e) => e.kind(),
            AppError::Input { .. } => "InputError",
            AppError::Output { .. } => "OutputError",
            AppError::Usage(_) => "UsageError",
        }
    }

    /// One-line JSON document for stderr.
    pub fn to_json(&self) -> String {
        let mut body = serde_json::json!({
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let AppError::Engine(Error::Validation(v)) = self {
            body["violations"] = serde_json::json!(v.violations);
        }
        serde_json::json!({ "error": body }).to_string()
    }
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::Engine(e) => write!(f, "{e}"),
            AppError::Input { path, message } => write!(f, "cannot read {}: {message}", path.display()),
            AppError::Output { path, message } => write!(f, "cannot write {}: {message}", path.display()),
            AppError::Usage(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for AppError {}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        AppError::Engine(e)
    }
}
