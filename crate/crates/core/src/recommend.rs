//! Strategy recommendations and missing-property reports.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::problem::DecisionProblem;
use crate::scoring::{resolutions, ResolutionConfig};
use crate::taxonomy::{catalog, PropertyId, Strategy, PROPERTY_COUNT};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub property_id: PropertyId,
    pub resolution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Recommendation {
    pub strategy: Strategy,
    /// Enabling properties with non-zero resolution, ascending id.
    pub supporting_properties: Vec<Support>,
    /// Sum of the supporting resolutions.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub absent_properties: Vec<PropertyId>,
    /// No catalogued property applies.
    pub hardest_nut: bool,
}

/// Ranks every catalogued strategy that at least one resolving property
/// enables. Higher summed resolution first; ties go to the strategy whose
/// first enabling property comes earlier in the table, then by slug.
pub fn recommend(
    problem: &DecisionProblem,
    config: &ResolutionConfig,
    top: Option<usize>,
) -> Result<Vec<Recommendation>, Error> {
    problem.ensure_valid()?;
    config.validate()?;
    let r = resolutions(problem, config);
    let mut out: Vec<Recommendation> = catalog()
        .strategies
        .iter()
        .filter_map(|s| {
            let supporting: Vec<Support> = s
                .enabling_properties
                .iter()
                .map(|&id| Support {
                    property_id: id,
                    resolution: r[usize::from(id.get()) - 1],
                })
                .filter(|sup| sup.resolution > 0.0)
                .collect();
            if supporting.is_empty() {
                return None;
            }
            Some(Recommendation {
                score: supporting.iter().map(|s| s.resolution).sum(),
                strategy: s.clone(),
                supporting_properties: supporting,
            })
        })
        .collect();
    out.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| {
                a.strategy
                    .first_enabling_property()
                    .cmp(&b.strategy.first_enabling_property())
            })
            .then_with(|| a.strategy.id.cmp(&b.strategy.id))
    });
    if let Some(top) = top {
        out.truncate(top);
    }
    Ok(out)
}

pub fn gap_report(problem: &DecisionProblem, config: &ResolutionConfig) -> Result<GapReport, Error> {
    problem.ensure_valid()?;
    config.validate()?;
    let r = resolutions(problem, config);
    let absent_properties: Vec<PropertyId> = PropertyId::all()
        .zip(r)
        .filter(|(_, ri)| *ri == 0.0)
        .map(|(id, _)| id)
        .collect();
    Ok(GapReport {
        hardest_nut: absent_properties.len() == PROPERTY_COUNT,
        absent_properties,
    })
}
