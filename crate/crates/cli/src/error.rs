use std::fmt;

use serde_json::json;

/// Failure of a run, mapped onto the exit-code scheme.
#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed config, or inputs the library rejects.
    Config(String),
    /// A numerical routine failed on valid inputs.
    Numeric(String),
    /// A limit or iteration did not settle within its budget.
    Unconverged(String),
    /// The output directory could not be written.
    Io(String),
}

impl CliError {
    /// Unconverged runs count as numerical failures unless `strict`.
    pub fn exit_code(&self, strict: bool) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Unconverged(_) => {
                if strict {
                    4
                } else {
                    3
                }
            }
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Numeric(_) => "numeric",
            CliError::Unconverged(_) => "unconverged",
            CliError::Io(_) => "io",
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::Unconverged(m) | CliError::Io(m) => m,
        }
    }

    /// One-line JSON report for stderr.
    pub fn to_json(&self, strict: bool) -> String {
        json!({ "error": { "kind": self.kind(), "code": self.exit_code(strict), "message": self.message() } })
            .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{}: {}", self.kind(), self.message())
    }
}

impl From<inertial::Error> for CliError {
    fn from(e: inertial::Error) -> Self {
        if matches!(e, inertial::Error::Unconverged(_)) {
            CliError::Unconverged(e.to_string())
        } else if e.is_input_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
