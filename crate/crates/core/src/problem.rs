//! Decision problems in the states-actions-outcomes setting.
//!
//! A problem carries primary objectives, auxiliary metrics (resilience,
//! knowledge and the like), `expression <= bound` constraints, and the
//! analyst's pivotal-property assessments. A problem with no auxiliary
//! metrics is the plain multi-objective case.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::expression::Expression;
use crate::taxonomy::PROPERTY_COUNT;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionProblem {
    pub id: String,
    pub title: String,
    #[serde(default)]
    pub description: String,
    /// Who the analyst is; recorded, never used in scoring.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analyst_profile: Option<String>,
    #[serde(default)]
    pub states: Vec<StateDescriptor>,
    pub action_space: ActionSpace,
    #[serde(default)]
    pub objectives: Vec<Objective>,
    #[serde(default)]
    pub aux_metrics: Vec<Objective>,
    #[serde(default)]
    pub constraints: Vec<Constraint>,
    #[serde(default)]
    pub assessments: Vec<PropertyAssessment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDescriptor {
    pub id: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    Discrete,
    Continuous,
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ActionKind::Discrete => "discrete",
            ActionKind::Continuous => "continuous",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpace {
    pub kind: ActionKind,
    #[serde(default)]
    pub actions: Vec<Action>,
    #[serde(default)]
    pub variables: Vec<DecisionVariable>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Action {
    pub id: String,
    #[serde(default)]
    pub name: String,
    pub metric_values: BTreeMap<String, MetricValue>,
    /// Values for variables referenced by this action's expressions and by
    /// the problem's constraints.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bindings: BTreeMap<String, f64>,
}

/// A stated outcome, or an expression over the action's bindings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MetricValue {
    Literal(f64),
    Expression(Expression),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionVariable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl DecisionVariable {
    pub fn range(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Primary,
    Auxiliary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Objective {
    pub id: String,
    #[serde(default)]
    pub name: String,
    pub direction: Direction,
    pub kind: ObjectiveKind,
    /// Required for continuous problems. Discrete problems take their values
    /// from each action's `metric_values`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub definition: Option<Expression>,
}

/// `expression <= bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraint {
    pub id: String,
    pub expression: Expression,
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AssessmentMode {
    Binary,
    Resolution,
    Count,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropertyAssessment {
    pub property_id: i64,
    pub mode: AssessmentMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub present: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
    #[serde(default)]
    pub rationale: String,
}

impl PropertyAssessment {
    pub fn binary(property_id: i64, present: bool) -> Self {
        Self::empty(property_id, AssessmentMode::Binary).with(|a| a.present = Some(present))
    }

    pub fn resolution(property_id: i64, value: f64) -> Self {
        Self::empty(property_id, AssessmentMode::Resolution).with(|a| a.resolution = Some(value))
    }

    pub fn count(property_id: i64, n: u64) -> Self {
        Self::empty(property_id, AssessmentMode::Count).with(|a| a.count = Some(n))
    }

    pub fn with_rationale(mut self, rationale: impl Into<String>) -> Self {
        self.rationale = rationale.into();
        self
    }

    fn empty(property_id: i64, mode: AssessmentMode) -> Self {
        PropertyAssessment {
            property_id,
            mode,
            present: None,
            resolution: None,
            count: None,
            rationale: String::new(),
        }
    }

    fn with(mut self, f: impl FnOnce(&mut Self)) -> Self {
        f(&mut self);
        self
    }

    /// True when exactly the field matching `mode` is set.
    pub fn mode_fields_consistent(&self) -> bool {
        match self.mode {
            AssessmentMode::Binary => self.present.is_some() && self.resolution.is_none() && self.count.is_none(),
            AssessmentMode::Resolution => self.present.is_none() && self.resolution.is_some() && self.count.is_none(),
            AssessmentMode::Count => self.present.is_none() && self.resolution.is_none() && self.count.is_some(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DiagnosticCode {
    MissingObjective,
    DuplicateMetricId,
    ObjectiveKindMismatch,
    MissingDefinition,
    UnexpectedDefinition,
    EmptyStateId,
    EmptyActionSpace,
    ActionSpaceMismatch,
    DuplicateActionId,
    DuplicateVariable,
    InvalidBounds,
    MissingMetricValue,
    UnknownMetricValue,
    NonFiniteValue,
    UnboundVariable,
    DuplicateConstraintId,
    NonFiniteBound,
    UnknownProperty,
    DuplicateAssessment,
    ModeFieldsMismatch,
    ResolutionOutOfRange,
    EmptyFront,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::MissingObjective => "MISSING_OBJECTIVE",
            DiagnosticCode::DuplicateMetricId => "DUPLICATE_METRIC_ID",
            DiagnosticCode::ObjectiveKindMismatch => "OBJECTIVE_KIND_MISMATCH",
            DiagnosticCode::MissingDefinition => "MISSING_DEFINITION",
            DiagnosticCode::UnexpectedDefinition => "UNEXPECTED_DEFINITION",
            DiagnosticCode::EmptyStateId => "EMPTY_STATE_ID",
            DiagnosticCode::EmptyActionSpace => "EMPTY_ACTION_SPACE",
            DiagnosticCode::ActionSpaceMismatch => "ACTION_SPACE_MISMATCH",
            DiagnosticCode::DuplicateActionId => "DUPLICATE_ACTION_ID",
            DiagnosticCode::DuplicateVariable => "DUPLICATE_VARIABLE",
            DiagnosticCode::InvalidBounds => "INVALID_BOUNDS",
            DiagnosticCode::MissingMetricValue => "MISSING_METRIC_VALUE",
            DiagnosticCode::UnknownMetricValue => "UNKNOWN_METRIC_VALUE",
            DiagnosticCode::NonFiniteValue => "NON_FINITE_VALUE",
            DiagnosticCode::UnboundVariable => "UNBOUND_VARIABLE",
            DiagnosticCode::DuplicateConstraintId => "DUPLICATE_CONSTRAINT_ID",
            DiagnosticCode::NonFiniteBound => "NON_FINITE_BOUND",
            DiagnosticCode::UnknownProperty => "UNKNOWN_PROPERTY",
            DiagnosticCode::DuplicateAssessment => "DUPLICATE_ASSESSMENT",
            DiagnosticCode::ModeFieldsMismatch => "MODE_FIELDS_MISMATCH",
            DiagnosticCode::ResolutionOutOfRange => "RESOLUTION_OUT_OF_RANGE",
            DiagnosticCode::EmptyFront => "EMPTY_FRONT",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A reported problem with a document; `path` points at the offending field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: DiagnosticCode, path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.path, self.message)
    }
}

/// Where a candidate came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Action(String),
    Point(Vec<f64>),
}

/// An evaluated action or decision vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSolution {
    pub origin: Origin,
    /// Primary objectives then auxiliary metrics, in declaration order.
    pub objectives: Vec<f64>,
    /// `expression - bound` per constraint; feasible iff all are `<= 0`.
    pub constraint_slacks: Vec<f64>,
    pub feasible: bool,
}

impl CandidateSolution {
    pub fn new(origin: Origin, objectives: Vec<f64>, constraint_slacks: Vec<f64>) -> Self {
        let feasible = constraint_slacks.iter().all(|s| *s <= 0.0);
        CandidateSolution {
            origin,
            objectives,
            constraint_slacks,
            feasible,
        }
    }
}

impl DecisionProblem {
    /// Primary objectives followed by auxiliary metrics.
    pub fn metrics(&self) -> impl Iterator<Item = &Objective> {
        self.objectives.iter().chain(&self.aux_metrics)
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.metrics().map(|m| m.direction).collect()
    }

    /// `p + q`.
    pub fn dimension(&self) -> usize {
        self.objectives.len() + self.aux_metrics.len()
    }

    /// Checks every structural invariant. An empty list means the problem is
    /// well-formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        self.check_metrics(&mut out);
        for (i, s) in self.states.iter().enumerate() {
            if s.id.trim().is_empty() {
                out.push(Diagnostic::new(
                    DiagnosticCode::EmptyStateId,
                    format!("states[{i}].id"),
                    "state id must be non-empty",
                ));
            }
        }
        match self.action_space.kind {
            ActionKind::Discrete => self.check_discrete(&mut out),
            ActionKind::Continuous => self.check_continuous(&mut out),
        }
        self.check_constraints(&mut out);
        self.check_assessments(&mut out);
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Returns `Err(Error::Invalid)` unless the problem validates cleanly.
    pub fn ensure_valid(&self) -> Result<(), Error> {
        let diagnostics = self.validate();
        if diagnostics.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(diagnostics))
        }
    }

    fn check_metrics(&self, out: &mut Vec<Diagnostic>) {
        if self.objectives.is_empty() {
            out.push(Diagnostic::new(
                DiagnosticCode::MissingObjective,
                "objectives",
                "at least one primary objective is required",
            ));
        }
        let mut seen = BTreeSet::new();
        let lists = [
            ("objectives", &self.objectives, ObjectiveKind::Primary),
            ("aux_metrics", &self.aux_metrics, ObjectiveKind::Auxiliary),
        ];
        for (list, metrics, kind) in lists {
            for (i, m) in metrics.iter().enumerate() {
                if !seen.insert(m.id.as_str()) {
                    out.push(Diagnostic::new(
                        DiagnosticCode::DuplicateMetricId,
                        format!("{list}[{i}].id"),
                        format!("metric id `{}` is declared more than once", m.id),
                    ));
                }
                if m.kind != kind {
                    out.push(Diagnostic::new(
                        DiagnosticCode::ObjectiveKindMismatch,
                        format!("{list}[{i}].kind"),
                        format!("entries of `{list}` must have kind {kind:?}").to_lowercase(),
                    ));
                }
                match (self.action_space.kind, &m.definition) {
                    (ActionKind::Continuous, None) => out.push(Diagnostic::new(
                        DiagnosticCode::MissingDefinition,
                        format!("{list}[{i}].definition"),
                        format!("metric `{}` needs an expression over the decision variables", m.id),
                    )),
                    (ActionKind::Discrete, Some(_)) => out.push(Diagnostic::new(
                        DiagnosticCode::UnexpectedDefinition,
                        format!("{list}[{i}].definition"),
                        "discrete problems take metric values from each action",
                    )),
                    (ActionKind::Continuous, Some(expr)) => {
                        let names = self.variable_names();
                        check_references(expr, &names, &format!("{list}[{i}].definition"), out);
                    }
                    (ActionKind::Discrete, None) => {}
                }
            }
        }
    }

    fn variable_names(&self) -> BTreeSet<&str> {
        self.action_space.variables.iter().map(|v| v.name.as_str()).collect()
    }

    fn check_discrete(&self, out: &mut Vec<Diagnostic>) {
        let space = &self.action_space;
        if space.actions.is_empty() {
            out.push(Diagnostic::new(
                DiagnosticCode::EmptyActionSpace,
                "action_space.actions",
                "a discrete action space needs at least one action",
            ));
        }
        if !space.variables.is_empty() {
            out.push(Diagnostic::new(
                DiagnosticCode::ActionSpaceMismatch,
                "action_space.variables",
                "a discrete action space cannot declare decision variables",
            ));
        }
        let metric_ids: BTreeSet<&str> = self.metrics().map(|m| m.id.as_str()).collect();
        let mut seen = BTreeSet::new();
        for (i, action) in space.actions.iter().enumerate() {
            let path = format!("action_space.actions[{i}]");
            if !seen.insert(action.id.as_str()) {
                out.push(Diagnostic::new(
                    DiagnosticCode::DuplicateActionId,
                    format!("{path}.id"),
                    format!("action id `{}` is declared more than once", action.id),
                ));
            }
            for id in &metric_ids {
                if !action.metric_values.contains_key(*id) {
                    out.push(Diagnostic::new(
                        DiagnosticCode::MissingMetricValue,
                        format!("{path}.metric_values"),
                        format!("action `{}` has no value for metric `{id}`", action.id),
                    ));
                }
            }
            let bound: BTreeSet<&str> = action.bindings.keys().map(String::as_str).collect();
            for (key, value) in &action.metric_values {
                let vpath = format!("{path}.metric_values.{key}");
                if !metric_ids.contains(key.as_str()) {
                    out.push(Diagnostic::new(
                        DiagnosticCode::UnknownMetricValue,
                        vpath.clone(),
                        format!("`{key}` is not a declared objective or auxiliary metric"),
                    ));
                }
                match value {
                    MetricValue::Literal(v) if !v.is_finite() => out.push(Diagnostic::new(
                        DiagnosticCode::NonFiniteValue,
                        vpath,
                        "literal metric values must be finite",
                    )),
                    MetricValue::Literal(_) => {}
                    MetricValue::Expression(expr) => check_references(expr, &bound, &vpath, out),
                }
            }
            for (name, value) in &action.bindings {
                if !value.is_finite() {
                    out.push(Diagnostic::new(
                        DiagnosticCode::NonFiniteValue,
                        format!("{path}.bindings.{name}"),
                        "bindings must be finite",
                    ));
                }
            }
            for (j, c) in self.constraints.iter().enumerate() {
                check_references(
                    &c.expression,
                    &bound,
                    &format!("constraints[{j}].expression (action `{}`)", action.id),
                    out,
                );
            }
        }
    }

    fn check_continuous(&self, out: &mut Vec<Diagnostic>) {
        let space = &self.action_space;
        if space.variables.is_empty() {
            out.push(Diagnostic::new(
                DiagnosticCode::EmptyActionSpace,
                "action_space.variables",
                "a continuous action space needs at least one decision variable",
            ));
        }
        if !space.actions.is_empty() {
            out.push(Diagnostic::new(
                DiagnosticCode::ActionSpaceMismatch,
                "action_space.actions",
                "a continuous action space cannot list discrete actions",
            ));
        }
        let mut seen = BTreeSet::new();
        for (i, v) in space.variables.iter().enumerate() {
            if !seen.insert(v.name.as_str()) {
                out.push(Diagnostic::new(
                    DiagnosticCode::DuplicateVariable,
                    format!("action_space.variables[{i}].name"),
                    format!("variable `{}` is declared more than once", v.name),
                ));
            }
            if !(v.lower.is_finite() && v.upper.is_finite() && v.lower < v.upper) {
                out.push(Diagnostic::new(
                    DiagnosticCode::InvalidBounds,
                    format!("action_space.variables[{i}]"),
                    format!("bounds [{}, {}] must be finite with lower < upper", v.lower, v.upper),
                ));
            }
        }
        let names = self.variable_names();
        for (j, c) in self.constraints.iter().enumerate() {
            check_references(&c.expression, &names, &format!("constraints[{j}].expression"), out);
        }
    }

    fn check_constraints(&self, out: &mut Vec<Diagnostic>) {
        let mut seen = BTreeSet::new();
        for (j, c) in self.constraints.iter().enumerate() {
            if !seen.insert(c.id.as_str()) {
                out.push(Diagnostic::new(
                    DiagnosticCode::DuplicateConstraintId,
                    format!("constraints[{j}].id"),
                    format!("constraint id `{}` is declared more than once", c.id),
                ));
            }
            if !c.bound.is_finite() {
                out.push(Diagnostic::new(
                    DiagnosticCode::NonFiniteBound,
                    format!("constraints[{j}].bound"),
                    "constraint bound must be finite",
                ));
            }
        }
    }

    fn check_assessments(&self, out: &mut Vec<Diagnostic>) {
        let mut seen = BTreeSet::new();
        for (i, a) in self.assessments.iter().enumerate() {
            let path = format!("assessments[{i}]");
            if !(1..=PROPERTY_COUNT as i64).contains(&a.property_id) {
                out.push(Diagnostic::new(
                    DiagnosticCode::UnknownProperty,
                    format!("{path}.property_id"),
                    format!("property {} does not exist; ids run from 1 to 14", a.property_id),
                ));
            } else if !seen.insert(a.property_id) {
                out.push(Diagnostic::new(
                    DiagnosticCode::DuplicateAssessment,
                    format!("{path}.property_id"),
                    format!("property {} is assessed more than once", a.property_id),
                ));
            }
            if !a.mode_fields_consistent() {
                out.push(Diagnostic::new(
                    DiagnosticCode::ModeFieldsMismatch,
                    path.clone(),
                    format!("{:?} mode requires exactly its own value field", a.mode).to_lowercase(),
                ));
            }
            if let Some(r) = a.resolution {
                if !(0.0..=1.0).contains(&r) {
                    out.push(Diagnostic::new(
                        DiagnosticCode::ResolutionOutOfRange,
                        format!("{path}.resolution"),
                        format!("resolution {r} lies outside [0, 1]"),
                    ));
                }
            }
        }
    }

    /// Evaluates one discrete action.
    pub fn evaluate_action(&self, action: &Action) -> Result<CandidateSolution, Error> {
        if self.action_space.kind != ActionKind::Discrete {
            return Err(Error::KindMismatch {
                expected: ActionKind::Discrete,
            });
        }
        let wrap = |e: Error| Error::Action {
            action: action.id.clone(),
            source: Box::new(e),
        };
        let mut objectives = Vec::with_capacity(self.dimension());
        for metric in self.metrics() {
            let value = match action.metric_values.get(&metric.id) {
                Some(MetricValue::Literal(v)) => *v,
                Some(MetricValue::Expression(expr)) => expr.evaluate(&action.bindings).map_err(|e| wrap(e.into()))?,
                None => {
                    return Err(wrap(Error::MissingMetric {
                        metric: metric.id.clone(),
                    }))
                }
            };
            objectives.push(value);
        }
        let slacks = self
            .constraints
            .iter()
            .map(|c| Ok(c.expression.evaluate(&action.bindings)? - c.bound))
            .collect::<Result<Vec<_>, crate::expression::ExprError>>()
            .map_err(|e| wrap(e.into()))?;
        Ok(CandidateSolution::new(
            Origin::Action(action.id.clone()),
            objectives,
            slacks,
        ))
    }

    /// Evaluates a point of a continuous action space, one value per
    /// declared variable.
    pub fn evaluate_point(&self, point: &[f64]) -> Result<CandidateSolution, Error> {
        if self.action_space.kind != ActionKind::Continuous {
            return Err(Error::KindMismatch {
                expected: ActionKind::Continuous,
            });
        }
        let vars = &self.action_space.variables;
        if point.len() != vars.len() {
            return Err(Error::DimensionMismatch {
                expected: vars.len(),
                actual: point.len(),
            });
        }
        for (v, &x) in vars.iter().zip(point) {
            if !(v.lower..=v.upper).contains(&x) {
                return Err(Error::OutOfBounds {
                    variable: v.name.clone(),
                    value: x,
                    lower: v.lower,
                    upper: v.upper,
                });
            }
        }
        let lookup = |name: &str| vars.iter().position(|v| v.name == name).map(|i| point[i]);
        let mut objectives = Vec::with_capacity(self.dimension());
        for metric in self.metrics() {
            let expr = metric.definition.as_ref().ok_or_else(|| Error::MissingMetric {
                metric: metric.id.clone(),
            })?;
            objectives.push(expr.evaluate_with(&lookup)?);
        }
        let slacks = self
            .constraints
            .iter()
            .map(|c| Ok(c.expression.evaluate_with(&lookup)? - c.bound))
            .collect::<Result<Vec<_>, crate::expression::ExprError>>()?;
        Ok(CandidateSolution::new(
            Origin::Point(point.to_vec()),
            objectives,
            slacks,
        ))
    }
}

fn check_references(expr: &Expression, known: &BTreeSet<&str>, path: &str, out: &mut Vec<Diagnostic>) {
    for name in expr.variables() {
        if !known.contains(name) {
            out.push(Diagnostic::new(
                DiagnosticCode::UnboundVariable,
                path,
                format!("`{}` references undeclared variable `{name}`", expr.source()),
            ));
        }
    }
}
