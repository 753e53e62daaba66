//! Multi-objective solving: dominance, nondominated filtering, exhaustive
//! search over discrete actions and evolutionary search over continuous
//! decision variables.

mod search;
mod tradeoff;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

pub use search::{solve_continuous, SearchConfig};
pub use tradeoff::{tradeoff_summary, ObjectiveExtremes, TradeoffSummary};

use crate::problem::{ActionKind, CandidateSolution, DecisionProblem, Diagnostic, DiagnosticCode, Direction};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub members: Vec<CandidateSolution>,
    pub directions: Vec<Direction>,
    /// Non-fatal notes, such as an empty feasible set.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<Diagnostic>,
}

impl ParetoFront {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn warn_if_empty(mut self, what: &str) -> Self {
        if self.members.is_empty() {
            self.warnings.push(Diagnostic::new(
                DiagnosticCode::EmptyFront,
                "action_space",
                format!("no feasible {what}; the front is empty"),
            ));
        }
        self
    }
}

/// True iff `a` is at least as good as `b` everywhere and strictly better
/// somewhere.
pub fn dominates(a: &CandidateSolution, b: &CandidateSolution, directions: &[Direction]) -> Result<bool, Error> {
    check_len(a.objectives.len(), directions.len())?;
    check_len(b.objectives.len(), directions.len())?;
    Ok(dominates_values(&a.objectives, &b.objectives, directions))
}

/// Dominance on raw objective vectors of equal length.
pub fn dominates_values(a: &[f64], b: &[f64], directions: &[Direction]) -> bool {
    let mut strictly = false;
    for ((&x, &y), dir) in a.iter().zip(b).zip(directions) {
        let (x, y) = match dir {
            Direction::Maximize => (x, y),
            Direction::Minimize => (y, x),
        };
        // NaN compares as neither, so it never dominates.
        if !matches!(x.partial_cmp(&y), Some(Ordering::Greater | Ordering::Equal)) {
            return false;
        }
        if x > y {
            strictly = true;
        }
    }
    strictly
}

fn check_len(actual: usize, expected: usize) -> Result<(), Error> {
    if actual == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

/// Feasible candidates not dominated by any other feasible candidate, in
/// input order. Candidates with identical objective vectors are all kept.
pub fn pareto_filter(candidates: Vec<CandidateSolution>, directions: &[Direction]) -> Result<ParetoFront, Error> {
    for c in &candidates {
        check_len(c.objectives.len(), directions.len())?;
    }
    let keep = nondominated_indices(&candidates, directions);
    let mut keep = keep.into_iter().peekable();
    let members = candidates
        .into_iter()
        .enumerate()
        .filter_map(|(i, c)| {
            if keep.peek() == Some(&i) {
                keep.next();
                Some(c)
            } else {
                None
            }
        })
        .collect();
    Ok(ParetoFront {
        members,
        directions: directions.to_vec(),
        warnings: Vec::new(),
    })
}

/// Indices (ascending) of the feasible nondominated candidates.
///
/// Candidates are visited best-first in lexicographic order of their
/// oriented objectives, so any dominator of a candidate is visited before it,
/// and it suffices to test each candidate against the members kept so far.
fn nondominated_indices(candidates: &[CandidateSolution], directions: &[Direction]) -> Vec<usize> {
    let oriented = |c: &CandidateSolution| -> Vec<f64> {
        c.objectives
            .iter()
            .zip(directions)
            .map(|(&v, d)| if *d == Direction::Maximize { v } else { -v })
            .collect()
    };
    let mut keep = Vec::new();
    let mut order: Vec<(usize, Vec<f64>)> = Vec::new();
    for (i, c) in candidates.iter().enumerate() {
        if !c.feasible {
            continue;
        }
        if c.objectives.iter().any(|v| v.is_nan()) {
            // NaN compares false both ways: never dominated, never dominating.
            keep.push(i);
        } else {
            order.push((i, oriented(c)));
        }
    }
    order.sort_by(|(ia, a), (ib, b)| lex_desc(a, b).then(ia.cmp(ib)));

    let all_max = vec![Direction::Maximize; directions.len()];
    let mut front: Vec<usize> = Vec::new();
    for (pos, (i, v)) in order.iter().enumerate() {
        let dominated = front.iter().any(|&f| dominates_values(&order[f].1, v, &all_max));
        if !dominated {
            front.push(pos);
            keep.push(*i);
        }
    }
    keep.sort_unstable();
    keep
}

fn lex_desc(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.total_cmp(x) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Evaluates every action and keeps the nondominated feasible ones.
pub fn solve_discrete(problem: &DecisionProblem) -> Result<ParetoFront, Error> {
    problem.ensure_valid()?;
    if problem.action_space.kind != ActionKind::Discrete {
        return Err(Error::KindMismatch {
            expected: ActionKind::Discrete,
        });
    }
    let candidates = problem
        .action_space
        .actions
        .iter()
        .map(|a| problem.evaluate_action(a))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(pareto_filter(candidates, &problem.directions())?.warn_if_empty("action"))
}

/// Dispatches on the action-space kind.
pub fn solve(problem: &DecisionProblem, config: &SearchConfig) -> Result<ParetoFront, Error> {
    match problem.action_space.kind {
        ActionKind::Discrete => solve_discrete(problem),
        ActionKind::Continuous => solve_continuous(problem, config),
    }
}
