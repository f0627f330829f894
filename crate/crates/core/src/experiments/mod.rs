//! Command-line experiments: spectra, entanglement trajectories, figure data
//! and the invariant self-test.

pub mod cli;
pub mod commands;
pub mod figures;
pub mod output;
pub mod plan;
pub mod selftest;

use std::fmt;
use std::path::PathBuf;

use crate::entanglement::PartitionLabel;
use crate::error::Error;

pub use plan::{AxisGrid, AxisName, Format, Grid, SweepAxis, SweepPlan};

/// Failures surfaced by the CLI, each mapped to an exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Exit code 2: unreadable, malformed or inconsistent input, or I/O.
    Config(String),
    /// Exit code 3: a numerical routine failed.
    Numeric(String),
    /// Exit code 1: named checks failed.
    CheckFailed(Vec<String>),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(e: impl fmt::Display) -> Self {
        CliError::Config(format!("I/O: {e}"))
    }

    pub fn from_lib(e: Error) -> Self {
        if e.is_input_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::CheckFailed(names) => write!(f, "checks failed: {}", names.join(", ")),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::from_lib(e)
    }
}

/// Flags shared by every command.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub tol: Option<f64>,
    pub partition: Option<PartitionLabel>,
    pub covariance: bool,
}

impl RunOptions {
    pub fn format_for(&self, plan: &SweepPlan) -> Format {
        self.format.or(plan.format).unwrap_or(Format::Csv)
    }

    /// `--out`, else the plan's `output`, else `default`.
    pub fn out_for(&self, plan: &SweepPlan, default: Option<&str>) -> Option<PathBuf> {
        self.out
            .clone()
            .or_else(|| plan.output.as_ref().map(PathBuf::from))
            .or_else(|| default.map(PathBuf::from))
    }
}

/// A named pass/fail check reported by a command.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: Option<f64>,
    pub passed: bool,
}

impl Check {
    /// Passes when `value <= tol`.
    pub fn at_most(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tol: Some(tol),
            passed: value <= tol,
        }
    }

    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 0.0 } else { 1.0 },
            tol: None,
            passed: ok,
        }
    }
}

/// What a command produced.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn failed(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()
    }

    /// `Err(CheckFailed)` if any check failed.
    pub fn into_result(self) -> Result<Self, CliError> {
        let failed = self.failed();
        if failed.is_empty() {
            Ok(self)
        } else {
            Err(CliError::CheckFailed(failed))
        }
    }
}
