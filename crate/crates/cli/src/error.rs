use std::path::PathBuf;

use rlspec_core::oplib::OperatorParseError;
use serde::Serialize;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_VALIDATION,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Validation(_) => "validation",
            CliError::Numerical(_) => "numerical",
        }
    }

    pub fn from_operator_parse(path: PathBuf, e: OperatorParseError) -> Self {
        match e {
            OperatorParseError::Syntax { line, column, message } => CliError::Parse { path, line, column, message },
            OperatorParseError::Invalid(e) => CliError::from(e),
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            exit_code: u8,
            message: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            line: Option<usize>,
            #[serde(skip_serializing_if = "Option::is_none")]
            column: Option<usize>,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        let (line, column) = match self {
            CliError::Parse { line, column, .. } => (Some(*line), Some(*column)),
            _ => (None, None),
        };
        let body = Body { kind: self.kind(), exit_code: self.exit_code(), message: self.to_string(), line, column };
        serde_json::to_string(&Wrapper { error: body }).expect("plain data serializes")
    }
}

impl From<rlspec_core::Error> for CliError {
    fn from(e: rlspec_core::Error) -> Self {
        use rlspec_core::Error as E;
        match e {
            E::IllConditioned { .. } | E::HermitianViolation { .. } | E::NotPositiveDefinite { .. } | E::EigenSolver { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}
