use std::fmt;
use std::process::ExitCode;

use cfde_core::{AlgebraError, ParseError, SolveError};
use serde::Serialize;

/// What went wrong, grouped by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration. Exit 1.
    Usage(String),
    /// The equation text did not parse. Exit 1.
    Parse { source: String, error: ParseError },
    /// Root finding, Wronskian or initial-value fitting failed. Exit 2.
    Solve(SolveError),
    /// Verification ran but did not pass, or could not be carried out. Exit 3.
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) | CliError::Parse { .. } => 1,
            CliError::Solve(_) => 2,
            CliError::Verify(_) => 3,
        })
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Parse { .. } => "parse",
            CliError::Solve(_) => "solver",
            CliError::Verify(_) => "verification",
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: String,
            #[serde(skip_serializing_if = "Option::is_none")]
            offset: Option<usize>,
            #[serde(skip_serializing_if = "Option::is_none")]
            expected: Option<&'a [&'static str]>,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            error: Body<'a>,
        }
        let (offset, expected) = match self {
            CliError::Parse { error, .. } => (Some(error.offset), Some(error.expected())),
            _ => (None, None),
        };
        let doc = Doc {
            error: Body {
                kind: self.kind(),
                message: self.to_string(),
                offset,
                expected,
            },
        };
        serde_json::to_string(&doc).expect("error document serializes")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Verify(m) => f.write_str(m),
            CliError::Parse { error, .. } => write!(f, "parse error {error}"),
            CliError::Solve(e) => write!(f, "solver error: {e}"),
        }
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::Algebra(a @ (AlgebraError::InvalidAlpha(_) | AlgebraError::NonPositiveTime(_))) => {
                CliError::Usage(a.to_string())
            }
            e @ SolveError::WrongTargetCount { .. } => CliError::Usage(e.to_string()),
            e => CliError::Solve(e),
        }
    }
}

/// The source line with a caret under the error offset.
pub fn caret(source: &str, offset: usize) -> String {
    let line_start = source[..offset].rfind('\n').map_or(0, |i| i + 1);
    let line_end = source[offset..].find('\n').map_or(source.len(), |i| offset + i);
    let col = source[line_start..offset].chars().count();
    format!("  {}\n  {}^", &source[line_start..line_end], " ".repeat(col))
}
