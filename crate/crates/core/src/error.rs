use thiserror::Error;

use crate::solver::BvpSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A single violated scenario invariant, with a stable machine-readable code.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ValidationIssue {
    pub code: &'static str,
    pub message: String,
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.code, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// A potential was evaluated at or inside its pole.
    #[error("infeasible configuration: {0}")]
    InfeasibleConfiguration(String),

    /// Argument outside the domain of a retraction inverse.
    #[error("out of retraction domain: {0}")]
    OutOfDomain(String),

    #[error("integration step {step} rejected: {source}")]
    StepRejected {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("per-step Newton solve diverged after {iterations} iterations (residual {residual:.3e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("forward sweep failed at step {step}: {source}")]
    SweepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        best: Box<BvpSolution>,
    },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("scenario validation failed: {}", format_issues(.0))]
    Validation(Vec<ValidationIssue>),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_issues(issues: &[ValidationIssue]) -> String {
    issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub(crate) fn infeasible(msg: impl Into<String>) -> Self {
        Error::InfeasibleConfiguration(msg.into())
    }

    /// True when the error (possibly wrapped) comes from a potential pole.
    pub fn is_infeasible(&self) -> bool {
        match self {
            Error::InfeasibleConfiguration(_) => true,
            Error::StepRejected { source, .. } | Error::SweepFailed { source, .. } => {
                source.is_infeasible()
            }
            _ => false,
        }
    }
}
