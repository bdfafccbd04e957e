use thiserror::Error;

use plan_lp::{LpFormatError, ModelError, SolveError};

/// Failures while reading or validating a scenario.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("missing file {file} in {dir}")]
    MissingFile { file: String, dir: String },
    #[error("{file} line {line}, column {column}: {message}")]
    MalformedRow { file: String, line: u64, column: String, message: String },
    #[error("{file} line {line}: {message}")]
    BrokenReference { file: String, line: u64, message: String },
    #[error("invariant violated ({rule}): {detail}")]
    InvariantViolation { rule: &'static str, detail: String },
    #[error("i/o error on {file}: {message}")]
    Io { file: String, message: String },
}

impl ScenarioError {
    pub(crate) fn invariant(rule: &'static str, detail: impl Into<String>) -> Self {
        ScenarioError::InvariantViolation { rule, detail: detail.into() }
    }

    pub(crate) fn reference(file: &str, line: u64, message: impl Into<String>) -> Self {
        ScenarioError::BrokenReference { file: file.to_string(), line, message: message.into() }
    }

    /// The rule name for invariant violations.
    pub fn rule(&self) -> Option<&'static str> {
        match self {
            ScenarioError::InvariantViolation { rule, .. } => Some(rule),
            _ => None,
        }
    }
}

/// Failures while compiling a scenario into a linear model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("asset {asset} uses investment method {found}; the {method} formulation cannot model it")]
    WrongMethod { asset: String, found: String, method: &'static str },
    #[error("no availability profile for asset {asset} at {slot}")]
    MissingProfile { asset: String, slot: String },
    #[error("no vintage profile for asset {asset}, vintage {vintage}, and fallback is disabled")]
    MissingVintageProfile { asset: String, vintage: i32 },
    #[error("unknown collapse policy {0:?} (expected operational, min, mean, max or weighted)")]
    UnknownPolicy(String),
    #[error("capacity-weighted policy needs an optimal reference solve")]
    MissingReferenceSolve,
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Failures in the analysis layer.
#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    LpFormat(#[from] LpFormatError),
    #[error("oracle limit exceeded: {decisions} integer decisions (limit {limit})")]
    TooLarge { decisions: usize, limit: usize },
    #[error("no methods selected")]
    EmptySelection,
}
