//! Browser bindings. Each export takes and returns JSON strings; the
//! `*_json` functions hold the logic so they can be tested natively.

use pivotal_core::io::{parse_problem, to_canonical_json};
use pivotal_core::moo::{solve, tradeoff_summary};
use pivotal_core::problem::{DecisionProblem, PropertyAssessment};
use pivotal_core::{complexity, gap_report, recommend, ResolutionConfig, SearchConfig};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest population x generations the page may request.
pub const MAX_EVALUATIONS: u64 = 200_000;

/// A problem whose only content is binary assessments for `present_ids`.
fn toggled(present_ids: &str) -> Result<DecisionProblem, String> {
    let ids: Vec<i64> = serde_json::from_str(present_ids).map_err(|e| format!("property ids: {e}"))?;
    let mut problem: DecisionProblem = serde_json::from_value(json!({
        "id": "toggles",
        "title": "Property toggles",
        "action_space": { "kind": "continuous", "variables": [{ "name": "x", "lower": 0, "upper": 1 }] },
        "objectives": [{ "id": "f", "name": "f", "direction": "minimize", "kind": "primary", "definition": "x" }],
    }))
    .map_err(|e| e.to_string())?;
    problem.assessments = ids.into_iter().map(|id| PropertyAssessment::binary(id, true)).collect();
    Ok(problem)
}

fn config(c: f64) -> ResolutionConfig {
    ResolutionConfig::with_c(c)
}

/// Complexity of a problem in which exactly `present_ids` (a JSON array of
/// property ids) hold, each resolving with `c`.
pub fn gauge_json(present_ids: &str, c: f64) -> Result<String, String> {
    let problem = toggled(present_ids)?;
    let score = complexity(&problem, &config(c)).map_err(|e| e.to_string())?;
    Ok(to_canonical_json(&score))
}

pub fn recommend_json(present_ids: &str, c: f64, top: usize) -> Result<String, String> {
    let problem = toggled(present_ids)?;
    let cfg = config(c);
    let limit = if top == 0 { None } else { Some(top) };
    let recommendations = recommend(&problem, &cfg, limit).map_err(|e| e.to_string())?;
    let gaps = gap_report(&problem, &cfg).map_err(|e| e.to_string())?;
    Ok(to_canonical_json(
        &json!({ "recommendations": recommendations, "gaps": gaps }),
    ))
}

/// Pareto front of a problem document, with metric ids for labelling.
pub fn front_json(document: &str, seed: u64, population: usize, generations: usize) -> Result<String, String> {
    if population as u64 * generations as u64 > MAX_EVALUATIONS {
        return Err(format!("population x generations must not exceed {MAX_EVALUATIONS}"));
    }
    let problem = parse_problem(document).map_err(|e| format!("{}: {e}", e.code()))?;
    let search = SearchConfig {
        seed,
        population,
        generations,
        ..SearchConfig::default()
    };
    let front = solve(&problem, &search).map_err(|e| e.to_string())?;
    let tradeoff = tradeoff_summary(&front).ok();
    let metrics: Vec<&str> = problem.metrics().map(|m| m.id.as_str()).collect();
    Ok(to_canonical_json(
        &json!({ "metrics": metrics, "front": front, "tradeoff": tradeoff }),
    ))
}

#[wasm_bindgen]
pub fn gauge(present_ids: &str, c: f64) -> Result<String, JsValue> {
    gauge_json(present_ids, c).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = recommendStrategies)]
pub fn recommend_strategies(present_ids: &str, c: f64, top: usize) -> Result<String, JsValue> {
    recommend_json(present_ids, c, top).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = paretoFront)]
pub fn pareto_front(document: &str, seed: u32, population: usize, generations: usize) -> Result<String, JsValue> {
    front_json(document, u64::from(seed), population, generations).map_err(|e| JsValue::from_str(&e))
}

/// The property and strategy catalog as JSON.
#[wasm_bindgen]
pub fn taxonomy() -> String {
    pivotal_core::catalog().to_json()
}
