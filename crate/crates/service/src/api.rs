//! Request decoding, engine calls and response encoding, independent of
//! the HTTP stack.

use pivotal_core::io::{parse_json, read_document_value, to_canonical_json, FORMAT_VERSION};
use pivotal_core::moo::{self, tradeoff_summary, ParetoFront, TradeoffSummary};
use pivotal_core::problem::{DecisionProblem, Diagnostic};
use pivotal_core::{catalog, complexity, gap_report, recommend, Error, GapReport, Recommendation};
use pivotal_core::{ResolutionConfig, SearchConfig};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Upper bound on population x generations for one optimize request.
pub const MAX_EVALUATIONS: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Validate,
    Score,
    Recommend,
    Optimize,
}

/// Optional tuning that travels next to the document. Names match the CLI
/// flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestConfig {
    pub c: Option<f64>,
    pub count_scale: Option<f64>,
    pub top: Option<usize>,
    pub population: Option<usize>,
    pub generations: Option<usize>,
    pub seed: Option<u64>,
    pub mutation_rate: Option<f64>,
    pub mutation_sigma: Option<f64>,
    pub crossover_rate: Option<f64>,
}

impl RequestConfig {
    pub fn resolution(&self) -> ResolutionConfig {
        let mut cfg = ResolutionConfig::default();
        if let Some(c) = self.c {
            cfg.default_c = c;
        }
        if let Some(n) = self.count_scale {
            cfg.count_scale = n;
        }
        cfg
    }

    pub fn search(&self) -> SearchConfig {
        let d = SearchConfig::default();
        SearchConfig {
            population: self.population.unwrap_or(d.population),
            generations: self.generations.unwrap_or(d.generations),
            seed: self.seed.unwrap_or(d.seed),
            mutation_rate: self.mutation_rate.unwrap_or(d.mutation_rate),
            mutation_sigma_fraction: self.mutation_sigma.unwrap_or(d.mutation_sigma_fraction),
            crossover_rate: self.crossover_rate.unwrap_or(d.crossover_rate),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationResult {
    pub valid: bool,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecommendResult {
    pub recommendations: Vec<Recommendation>,
    pub gaps: GapReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub front: ParetoFront,
    /// Absent when the front is empty.
    pub tradeoff: Option<TradeoffSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reply {
    pub status: u16,
    pub body: String,
}

impl Reply {
    fn ok(payload: &impl Serialize) -> Self {
        Reply {
            status: 200,
            body: to_canonical_json(payload),
        }
    }
}

pub fn validate_problem(problem: &DecisionProblem) -> ValidationResult {
    let diagnostics = problem.validate();
    ValidationResult {
        valid: diagnostics.is_empty(),
        diagnostics,
    }
}

pub fn recommend_problem(problem: &DecisionProblem, config: &RequestConfig) -> Result<RecommendResult, Error> {
    let cfg = config.resolution();
    Ok(RecommendResult {
        recommendations: recommend(problem, &cfg, config.top)?,
        gaps: gap_report(problem, &cfg)?,
    })
}

pub fn optimize_problem(problem: &DecisionProblem, config: &RequestConfig) -> Result<OptimizeResult, Error> {
    let search = config.search();
    let requested = search.population as u64 * search.generations as u64;
    if requested > MAX_EVALUATIONS {
        return Err(Error::InvalidConfig(format!(
            "population x generations = {requested} exceeds the limit of {MAX_EVALUATIONS}"
        )));
    }
    let front = moo::solve(problem, &search)?;
    let tradeoff = if front.is_empty() {
        None
    } else {
        Some(tradeoff_summary(&front)?)
    };
    Ok(OptimizeResult { front, tradeoff })
}

/// Splits a request body into the problem document and its config.
pub fn decode(body: &str) -> Result<(DecisionProblem, RequestConfig), Error> {
    let mut value = parse_json(body)?;
    let config = match value.as_object_mut().and_then(|o| o.remove("config")) {
        None | Some(Value::Null) => RequestConfig::default(),
        Some(raw) => serde_json::from_value(raw).map_err(|e| config_error(&e))?,
    };
    Ok((read_document_value(value)?, config))
}

fn config_error(err: &serde_json::Error) -> Error {
    let message = err.to_string();
    if let Some(field) = message
        .strip_prefix("unknown field `")
        .and_then(|rest| rest.split('`').next())
    {
        return Error::UnknownField {
            field: field.to_owned(),
            path: "config".into(),
        };
    }
    Error::InvalidConfig(message)
}

/// Handles one POST request body.
pub fn respond(endpoint: Endpoint, body: &str) -> Reply {
    let (problem, config) = match decode(body) {
        Ok(parts) => parts,
        Err(e) => return error_reply(&e),
    };
    let result = match endpoint {
        Endpoint::Validate => return Reply::ok(&validate_problem(&problem)),
        Endpoint::Score => complexity(&problem, &config.resolution()).map(|s| Reply::ok(&s)),
        Endpoint::Recommend => recommend_problem(&problem, &config).map(|r| Reply::ok(&r)),
        Endpoint::Optimize => optimize_problem(&problem, &config).map(|r| Reply::ok(&r)),
    };
    result.unwrap_or_else(|e| error_reply(&e))
}

pub fn taxonomy() -> Reply {
    Reply {
        status: 200,
        body: catalog().to_json(),
    }
}

pub fn health() -> Reply {
    Reply::ok(&json!({
        "status": "ok",
        "version": env!("CARGO_PKG_VERSION"),
        "format_version": FORMAT_VERSION,
    }))
}

/// Engine errors are all caused by the request, so they map to 400.
pub fn error_reply(err: &Error) -> Reply {
    let detail = match err {
        Error::Invalid(d) => serde_json::to_value(d).unwrap_or(Value::Null),
        Error::Malformed { path, line, column, .. } => json!({ "path": path, "line": line, "column": column }),
        Error::UnknownField { field, path } => json!({ "field": field, "path": path }),
        Error::Action { action, .. } => json!({ "action": action }),
        _ => Value::Null,
    };
    error_body(400, err.code(), &err.to_string(), detail)
}

pub fn internal_error(message: &str) -> Reply {
    error_body(500, "INTERNAL_ERROR", message, Value::Null)
}

fn error_body(status: u16, code: &str, message: &str, detail: Value) -> Reply {
    Reply {
        status,
        body: to_canonical_json(&json!({
            "error": { "code": code, "message": message, "detail": detail }
        })),
    }
}
