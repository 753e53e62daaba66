//! Shared generators and brute-force oracles for integration tests.
//!
//! The oracles here are deliberately naive and share no code with the
//! engine paths they check.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use pivotal_core::expression::{BinaryOp, Expression, Function, Node};
use pivotal_core::problem::{
    Action, ActionKind, ActionSpace, CandidateSolution, Constraint, DecisionProblem, DecisionVariable, Direction,
    MetricValue, Objective, ObjectiveKind, Origin, PropertyAssessment, StateDescriptor,
};
use proptest::prelude::*;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn fixture_path(name: &str) -> PathBuf {
    fixtures_dir().join(format!("{name}.dproblem.json"))
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).expect("fixture readable")
}

pub fn fixture(name: &str) -> DecisionProblem {
    pivotal_core::parse_problem(&fixture_text(name)).expect("fixture parses")
}

pub const VALID_FIXTURES: [&str; 5] = ["asteroid", "entrepreneur", "pandemic", "portfolio", "parabolas"];

/// `a` dominates `b`: never worse, once better.
pub fn oracle_dominates(a: &[f64], b: &[f64], maximize: &[bool]) -> bool {
    let mut better_once = false;
    for i in 0..a.len() {
        let (x, y) = if maximize[i] { (a[i], b[i]) } else { (-a[i], -b[i]) };
        if x < y {
            return false;
        }
        if x > y {
            better_once = true;
        }
    }
    better_once
}

/// O(n^2) nondominated filter over feasible candidates; returns indices.
pub fn brute_force_front(objectives: &[Vec<f64>], feasible: &[bool], maximize: &[bool]) -> Vec<usize> {
    (0..objectives.len())
        .filter(|&i| feasible[i])
        .filter(|&i| {
            !(0..objectives.len())
                .any(|j| j != i && feasible[j] && oracle_dominates(&objectives[j], &objectives[i], maximize))
        })
        .collect()
}

pub fn to_directions(maximize: &[bool]) -> Vec<Direction> {
    maximize
        .iter()
        .map(|&m| if m { Direction::Maximize } else { Direction::Minimize })
        .collect()
}

pub fn candidates(objectives: &[Vec<f64>], feasible: &[bool]) -> Vec<CandidateSolution> {
    objectives
        .iter()
        .zip(feasible)
        .enumerate()
        .map(|(i, (o, &f))| CandidateSolution {
            origin: Origin::Action(format!("c{i}")),
            objectives: o.clone(),
            constraint_slacks: vec![if f { -1.0 } else { 1.0 }],
            feasible: f,
        })
        .collect()
}

/// A random candidate set: objective count, directions, vectors, feasibility.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    pub maximize: Vec<bool>,
    pub objectives: Vec<Vec<f64>>,
    pub feasible: Vec<bool>,
}

fn objective_value() -> impl Strategy<Value = f64> {
    // Small integers force ties and duplicates; reals cover the general case.
    prop_oneof![(0i32..8).prop_map(f64::from), -1e3f64..1e3]
}

pub fn candidate_set(max_n: usize, max_dim: usize) -> impl Strategy<Value = CandidateSet> {
    (1..=max_dim).prop_flat_map(move |dim| {
        (
            prop::collection::vec(any::<bool>(), dim),
            prop::collection::vec(
                (prop::collection::vec(objective_value(), dim), prop::bool::weighted(0.8)),
                1..=max_n,
            ),
        )
            .prop_map(|(maximize, rows)| {
                let (objectives, feasible) = rows.into_iter().unzip();
                CandidateSet {
                    maximize,
                    objectives,
                    feasible,
                }
            })
    })
}

/// Random expression trees over `vars` of depth at most `depth`, with
/// non-negative literals (the printer writes negation as an operator).
pub fn expr_tree(vars: Vec<String>, depth: u32) -> impl Strategy<Value = Node> {
    let leaf = prop_oneof![
        prop_oneof![
            (0u32..100).prop_map(f64::from),
            0.0f64..1e6,
            Just(0.1),
            Just(1e-7),
            Just(2.5e10)
        ]
        .prop_map(Node::Literal),
        prop::sample::select(vars).prop_map(Node::Variable),
    ];
    leaf.prop_recursive(depth, 64, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|n| Node::Neg(Box::new(n))),
            (
                prop::sample::select(vec![
                    BinaryOp::Add,
                    BinaryOp::Sub,
                    BinaryOp::Mul,
                    BinaryOp::Div,
                    BinaryOp::Pow
                ]),
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| Node::Binary(op, Box::new(a), Box::new(b))),
            (
                prop::sample::select(vec![
                    Function::Abs,
                    Function::Tanh,
                    Function::Exp,
                    Function::Log,
                    Function::Sqrt
                ]),
                inner.clone()
            )
                .prop_map(|(f, a)| Node::Call(f, vec![a])),
            (
                prop::sample::select(vec![Function::Min, Function::Max]),
                prop::collection::vec(inner, 2..=3)
            )
                .prop_map(|(f, args)| Node::Call(f, args)),
        ]
    })
}

pub fn depth(node: &Node) -> usize {
    match node {
        Node::Literal(_) | Node::Variable(_) => 1,
        Node::Neg(a) => 1 + depth(a),
        Node::Binary(_, a, b) => 1 + depth(a).max(depth(b)),
        Node::Call(_, args) => 1 + args.iter().map(depth).max().unwrap_or(0),
    }
}

pub fn assessment() -> impl Strategy<Value = (i64, PropertyAssessment)> {
    (1i64..=14).prop_flat_map(|id| {
        prop_oneof![
            any::<bool>().prop_map(move |p| PropertyAssessment::binary(id, p)),
            prop_oneof![Just(0.0), Just(1.0), 0.0f64..=1.0].prop_map(move |r| PropertyAssessment::resolution(id, r)),
            (0u64..60).prop_map(move |n| PropertyAssessment::count(id, n)),
        ]
        .prop_map(move |a| (id, a))
    })
}

/// At most one assessment per property, in random order.
pub fn assessment_set() -> impl Strategy<Value = Vec<PropertyAssessment>> {
    prop::collection::vec(assessment(), 0..=14)
        .prop_map(|items| {
            let mut seen = BTreeMap::new();
            for (id, a) in items {
                seen.entry(id).or_insert(a);
            }
            seen.into_values().collect::<Vec<_>>()
        })
        .prop_shuffle()
}

fn text() -> impl Strategy<Value = String> {
    "[A-Za-z0-9 ,.()'-]{0,24}"
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        -1e3f64..1e3,
        Just(0.1)
    ]
}

fn metric(id: String, kind: ObjectiveKind, definition: Option<Node>) -> impl Strategy<Value = Objective> {
    (text(), any::<bool>()).prop_map(move |(name, max)| Objective {
        id: id.clone(),
        name,
        direction: if max { Direction::Maximize } else { Direction::Minimize },
        kind,
        definition: definition.clone().map(Expression::from_node),
    })
}

fn metrics(
    prefix: &'static str,
    n: usize,
    kind: ObjectiveKind,
    vars: Option<Vec<String>>,
) -> BoxedStrategy<Vec<Objective>> {
    let defs: BoxedStrategy<Vec<Option<Node>>> = match vars {
        Some(vars) => prop::collection::vec(expr_tree(vars, 3).prop_map(Some), n).boxed(),
        None => Just(vec![None; n]).boxed(),
    };
    defs.prop_flat_map(move |defs| {
        defs.into_iter()
            .enumerate()
            .map(|(i, d)| metric(format!("{prefix}{i}"), kind, d))
            .collect::<Vec<_>>()
    })
    .boxed()
}

fn continuous_space() -> impl Strategy<Value = (ActionSpace, Vec<String>)> {
    prop::collection::vec((finite(), 1e-3f64..1e3), 1..=3).prop_map(|bounds| {
        let variables: Vec<DecisionVariable> = bounds
            .into_iter()
            .enumerate()
            .map(|(i, (lower, width))| {
                let lower = lower.clamp(-1e300, 1e300);
                DecisionVariable {
                    name: format!("x{i}"),
                    lower,
                    upper: lower + width.max(lower.abs() * 1e-6),
                }
            })
            .collect();
        let names = variables.iter().map(|v| v.name.clone()).collect();
        (
            ActionSpace {
                kind: ActionKind::Continuous,
                actions: vec![],
                variables,
            },
            names,
        )
    })
}

fn discrete_actions(metric_ids: Vec<String>, binding_names: Vec<String>) -> impl Strategy<Value = Vec<Action>> {
    let one = {
        let metric_ids = metric_ids.clone();
        let binding_names = binding_names.clone();
        (
            text(),
            prop::collection::vec(
                prop_oneof![
                    finite().prop_map(MetricValue::Literal),
                    expr_tree(binding_names.clone(), 3).prop_map(|n| MetricValue::Expression(Expression::from_node(n))),
                ],
                metric_ids.len(),
            ),
            prop::collection::vec(finite(), binding_names.len()),
        )
            .prop_map(move |(name, values, bindings)| Action {
                id: String::new(),
                name,
                metric_values: metric_ids.iter().cloned().zip(values).collect(),
                bindings: binding_names.iter().cloned().zip(bindings).collect(),
            })
    };
    prop::collection::vec(one, 1..=4).prop_map(|mut actions| {
        for (i, a) in actions.iter_mut().enumerate() {
            a.id = format!("a{i}");
        }
        actions
    })
}

type ProblemBody = (ActionSpace, Vec<Objective>, Vec<Objective>, Vec<Constraint>);

/// Random problems that pass validation.
pub fn valid_problem() -> impl Strategy<Value = DecisionProblem> {
    (any::<bool>(), 1usize..=3, 0usize..=2, 0usize..=2).prop_flat_map(|(continuous, p, q, c)| {
        let header = (
            text(),
            text(),
            prop::option::of(text()),
            prop::collection::vec((text(), text()), 0..3),
        );
        let body: BoxedStrategy<ProblemBody> = if continuous {
            continuous_space()
                .prop_flat_map(move |(space, vars)| {
                    (
                        Just(space),
                        metrics("k", p, ObjectiveKind::Primary, Some(vars.clone())),
                        metrics("l", q, ObjectiveKind::Auxiliary, Some(vars.clone())),
                        constraints(vars, c),
                    )
                })
                .boxed()
        } else {
            let bindings: Vec<String> = vec!["b0".into(), "b1".into()];
            let ids: Vec<String> = (0..p)
                .map(|i| format!("k{i}"))
                .chain((0..q).map(|i| format!("l{i}")))
                .collect();
            (
                discrete_actions(ids, bindings.clone()),
                metrics("k", p, ObjectiveKind::Primary, None),
                metrics("l", q, ObjectiveKind::Auxiliary, None),
                constraints(bindings, c),
            )
                .prop_map(|(actions, k, l, cons)| {
                    (
                        ActionSpace {
                            kind: ActionKind::Discrete,
                            actions,
                            variables: vec![],
                        },
                        k,
                        l,
                        cons,
                    )
                })
                .boxed()
        };
        (header, body, assessment_set()).prop_map(
            |((title, description, analyst, states), (space, k, l, cons), assessments)| DecisionProblem {
                id: "generated".into(),
                title,
                description,
                analyst_profile: analyst,
                states: states
                    .into_iter()
                    .enumerate()
                    .map(|(i, (_, d))| StateDescriptor {
                        id: format!("s{i}"),
                        description: d,
                    })
                    .collect(),
                action_space: space,
                objectives: k,
                aux_metrics: l,
                constraints: cons,
                assessments,
            },
        )
    })
}

fn constraints(vars: Vec<String>, n: usize) -> impl Strategy<Value = Vec<Constraint>> {
    prop::collection::vec((expr_tree(vars, 3), finite()), n).prop_map(|items| {
        items
            .into_iter()
            .enumerate()
            .map(|(i, (node, bound))| Constraint {
                id: format!("c{i}"),
                expression: Expression::from_node(node),
                bound,
            })
            .collect()
    })
}

/// Same value, treating every NaN as equal.
pub fn same_real(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}
