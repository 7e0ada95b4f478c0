//! Report types. Analysis payloads are stored as JSON values so that a report
//! read back from disk compares equal to the one written.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::AnalysisConfig;
use crate::error::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        ToolInfo { name: env!("CARGO_PKG_NAME").into(), version: env!("CARGO_PKG_VERSION").into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        let kind = format!("{e:?}");
        let kind = kind.split([' ', '(', '{']).next().unwrap_or_default().to_string();
        ErrorInfo { kind, message: e.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Result(serde_json::Value),
    Error(ErrorInfo),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleReport {
    pub name: String,
    pub labels: Vec<String>,
    pub t: Vec<f64>,
    pub steps: Vec<usize>,
    /// Points on which the weights are exact.
    pub valid_len: usize,
    pub analyses: BTreeMap<String, Outcome>,
}

/// One verdict of the invariant suite; `passed = None` marks an
/// informational or refused check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: Option<bool>,
    pub value: Option<f64>,
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub tuples: usize,
    pub analyses_run: usize,
    pub errors: usize,
    pub verification_failures: usize,
    pub failed_checks: Vec<String>,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: ToolInfo,
    pub command: String,
    /// The configuration with every default filled in.
    pub config: AnalysisConfig,
    pub tuples: Vec<TupleReport>,
    pub summary: Summary,
    /// Wall-clock milliseconds; the only nondeterministic field.
    pub timings: BTreeMap<String, f64>,
}
