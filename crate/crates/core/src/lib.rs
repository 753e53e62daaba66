//! Decision analysis under deep uncertainty, organised around pivotal
//! properties: features of a problem that make uncertainty-robust strategies
//! available.
//!
//! * [`taxonomy`] holds the fourteen properties and their strategies.
//! * [`problem`] models decision problems; [`expression`] evaluates their
//!   objective and constraint definitions.
//! * [`scoring`] computes analytical complexity, [`recommend`] maps present
//!   properties to strategies.
//! * [`moo`] computes Pareto fronts for the objectives plus auxiliary
//!   metrics.
//! * [`io`] reads and writes problem documents, [`report`] renders results.

pub mod expression;
pub mod io;
pub mod moo;
pub mod problem;
pub mod recommend;
pub mod report;
pub mod scoring;
pub mod taxonomy;

use thiserror::Error;

use crate::expression::ExprError;
use crate::problem::{ActionKind, Diagnostic};

pub use crate::io::{parse_problem, read_document, serialize_problem, to_canonical_json, ProblemDocument};
pub use crate::moo::{dominates, pareto_filter, solve_continuous, solve_discrete, ParetoFront, SearchConfig};
pub use crate::problem::{CandidateSolution, DecisionProblem, Direction};
pub use crate::recommend::{gap_report, recommend, GapReport, Recommendation};
pub use crate::scoring::{complexity, complexity_binary, resolution, ComplexityScore, ResolutionConfig};
pub use crate::taxonomy::{catalog, strategies_for, PropertyId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expression(#[from] ExprError),
    #[error("unknown pivotal property {0}; ids run from 1 to 14")]
    UnknownProperty(i64),
    #[error("problem failed validation with {} diagnostic(s)", .0.len())]
    Invalid(Vec<Diagnostic>),
    #[error("expected {expected} values, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("variable `{variable}` = {value} lies outside [{lower}, {upper}]")]
    OutOfBounds {
        variable: String,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("action `{action}`: {source}")]
    Action { action: String, source: Box<Error> },
    #[error("no value for metric `{metric}`")]
    MissingMetric { metric: String },
    #[error("operation requires a {expected} action space")]
    KindMismatch { expected: ActionKind },
    #[error("{0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("trade-off summary needs a non-empty front")]
    EmptyFront,
    #[error("malformed document{}: {message}", location(.path, *.line, *.column))]
    Malformed {
        message: String,
        path: String,
        line: usize,
        column: usize,
    },
    #[error("unknown field `{field}` at `{path}`")]
    UnknownField { field: String, path: String },
    #[error("unsupported format_version {0}; expected \"1\"")]
    UnsupportedVersion(String),
}

fn location(path: &str, line: usize, column: usize) -> String {
    let mut s = String::new();
    if line > 0 {
        s.push_str(&format!(" at line {line} column {column}"));
    }
    if !path.is_empty() && path != "." {
        s.push_str(&format!(" (field `{path}`)"));
    }
    s
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Expression(e) => e.code(),
            Error::UnknownProperty(_) => "UNKNOWN_PROPERTY",
            Error::Invalid(_) => "VALIDATION_FAILED",
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::OutOfBounds { .. } => "OUT_OF_BOUNDS",
            Error::Action { source, .. } => source.code(),
            Error::MissingMetric { .. } => "MISSING_METRIC_VALUE",
            Error::KindMismatch { .. } => "ACTION_SPACE_MISMATCH",
            Error::Domain(_) => "DOMAIN_ERROR",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
            Error::EmptyFront => "EMPTY_FRONT",
            Error::Malformed { .. } => "MALFORMED_DOCUMENT",
            Error::UnknownField { .. } => "UNKNOWN_FIELD",
            Error::UnsupportedVersion(_) => "UNSUPPORTED_VERSION",
        }
    }

    /// Diagnostics attached to a validation failure.
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            Error::Invalid(d) => d,
            _ => &[],
        }
    }

    /// True for failures of the input document itself (syntax or schema).
    pub fn is_document_error(&self) -> bool {
        matches!(
            self,
            Error::Malformed { .. } | Error::UnknownField { .. } | Error::UnsupportedVersion(_)
        )
    }
}
