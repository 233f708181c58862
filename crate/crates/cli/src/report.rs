//! Report envelope shared by every command.

use std::fmt;

use frameforge::TolerancePolicy;
use serde::Serialize;
use serde_json::Value;

/// An input problem; the process exits with status 2.
#[derive(Debug)]
pub struct CliError(pub String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<frameforge::Error> for CliError {
    fn from(e: frameforge::Error) -> Self {
        CliError(e.to_string())
    }
}

pub fn input_error(msg: impl Into<String>) -> CliError {
    CliError(msg.into())
}

/// What a command produced: the JSON result, its text rendering, and
/// whether an `--assert` check failed.
pub struct Body {
    pub result: Value,
    pub text: String,
    pub negative: bool,
}

#[derive(Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub tolerance: TolerancePolicy,
    pub seed: u64,
    pub result: Value,
    pub exit_code: u8,
    #[serde(skip)]
    pub text: String,
}

impl Report {
    pub fn new(command: Vec<String>, tolerance: TolerancePolicy, seed: u64, body: Body) -> Self {
        let exit_code = u8::from(body.negative);
        let mut text = body.text;
        if body.negative {
            text.push_str("assertion failed\n");
        }
        Report {
            command,
            tolerance,
            seed,
            result: body.result,
            exit_code,
            text,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}
