//! Per-property resolutions and the analytical complexity score.
//!
//! Complexity is the product of `1 - r` over all fourteen properties, where
//! `r` is the extent to which a property resolves the problem. Absent or
//! unassessed properties resolve nothing (`r = 0`) and contribute a factor of
//! exactly one. When every present property resolves by the same constant `c`,
//! the product collapses to `(1 - c)^k`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::problem::{AssessmentMode, DecisionProblem, PropertyAssessment};
use crate::taxonomy::{PropertyId, PROPERTY_COUNT};
use crate::Error;

pub const DEFAULT_C: f64 = 0.5;
pub const DEFAULT_COUNT_SCALE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionConfig {
    /// Resolution of a present property in binary mode, in `(0, 1]`.
    pub default_c: f64,
    /// Scale `n0` of the count resolution `1 - tanh(n / n0)`.
    pub count_scale: f64,
    /// Per-property replacements for `default_c`.
    #[serde(default)]
    pub overrides: BTreeMap<u8, f64>,
}

impl Default for ResolutionConfig {
    fn default() -> Self {
        ResolutionConfig {
            default_c: DEFAULT_C,
            count_scale: DEFAULT_COUNT_SCALE,
            overrides: BTreeMap::new(),
        }
    }
}

impl ResolutionConfig {
    pub fn with_c(c: f64) -> Self {
        ResolutionConfig {
            default_c: c,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        check_c(self.default_c, "default_c")?;
        if !(self.count_scale > 0.0 && self.count_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "count_scale must be a positive finite number, got {}",
                self.count_scale
            )));
        }
        for (&id, &c) in &self.overrides {
            PropertyId::new(i64::from(id))?;
            check_c(c, &format!("override for property {id}"))?;
        }
        Ok(())
    }

    pub fn c_for(&self, id: i64) -> f64 {
        u8::try_from(id)
            .ok()
            .and_then(|id| self.overrides.get(&id))
            .copied()
            .unwrap_or(self.default_c)
    }
}

fn check_c(c: f64, what: &str) -> Result<(), Error> {
    if c > 0.0 && c <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{what} must lie in (0, 1], got {c}")))
    }
}

/// One property's contribution to the product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub property_id: PropertyId,
    pub resolution: f64,
    /// `1 - resolution`.
    pub factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityScore {
    pub h: f64,
    /// Properties with non-zero resolution, ascending id.
    pub factors: Vec<Factor>,
    pub k: usize,
}

/// How far an assessed property resolves the problem, in `[0, 1]`.
pub fn resolution(assessment: &PropertyAssessment, config: &ResolutionConfig) -> f64 {
    match assessment.mode {
        AssessmentMode::Binary => {
            if assessment.present.unwrap_or(false) {
                config.c_for(assessment.property_id)
            } else {
                0.0
            }
        }
        AssessmentMode::Resolution => assessment.resolution.unwrap_or(0.0),
        // Few possible events resolve strongly; r falls towards 0 as n grows.
        AssessmentMode::Count => {
            let n = assessment.count.unwrap_or(0) as f64;
            1.0 - (n / config.count_scale).tanh()
        }
    }
}

/// Resolution of every property, indexed by `id - 1`; unassessed ones are 0.
pub fn resolutions(problem: &DecisionProblem, config: &ResolutionConfig) -> [f64; PROPERTY_COUNT] {
    let mut out = [0.0; PROPERTY_COUNT];
    for a in &problem.assessments {
        if let Ok(id) = PropertyId::new(a.property_id) {
            out[usize::from(id.get()) - 1] = resolution(a, config);
        }
    }
    out
}

pub fn complexity(problem: &DecisionProblem, config: &ResolutionConfig) -> Result<ComplexityScore, Error> {
    problem.ensure_valid()?;
    config.validate()?;
    Ok(score_resolutions(&resolutions(problem, config)))
}

/// Builds the score from per-property resolutions. The product runs in
/// ascending property order.
pub fn score_resolutions(r: &[f64; PROPERTY_COUNT]) -> ComplexityScore {
    let mut h = 1.0;
    let mut factors = Vec::new();
    for (id, &ri) in PropertyId::all().zip(r) {
        let factor = 1.0 - ri;
        h *= factor;
        if ri > 0.0 {
            factors.push(Factor {
                property_id: id,
                resolution: ri,
                factor,
            });
        }
    }
    ComplexityScore {
        h,
        k: factors.len(),
        factors,
    }
}

/// Closed form `(1 - c)^k` for `k` present properties in binary mode.
pub fn complexity_binary(k: u32, c: f64) -> Result<f64, Error> {
    check_c(c, "c").map_err(|_| Error::Domain(format!("c must lie in (0, 1], got {c}")))?;
    if k as usize > PROPERTY_COUNT {
        return Err(Error::Domain(format!("k must not exceed {PROPERTY_COUNT}, got {k}")));
    }
    Ok((1.0 - c).powi(k as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::tests::continuous;

    fn problem_with(assessments: Vec<PropertyAssessment>) -> DecisionProblem {
        let mut p = continuous(&["x"], 0.0, 1.0);
        p.assessments = assessments;
        p
    }

    #[test]
    fn binary_resolutions() {
        let cfg = ResolutionConfig::default();
        assert_eq!(resolution(&PropertyAssessment::binary(3, true), &cfg), 0.5);
        assert_eq!(resolution(&PropertyAssessment::binary(3, false), &cfg), 0.0);
        let mut cfg = cfg;
        cfg.overrides.insert(3, 0.9);
        assert_eq!(resolution(&PropertyAssessment::binary(3, true), &cfg), 0.9);
        assert_eq!(resolution(&PropertyAssessment::binary(4, true), &cfg), 0.5);
    }

    #[test]
    fn direct_resolution_passes_through() {
        let cfg = ResolutionConfig::default();
        assert_eq!(resolution(&PropertyAssessment::resolution(1, 0.37), &cfg), 0.37);
    }

    #[test]
    fn count_resolution() {
        let cfg = ResolutionConfig::default();
        assert_eq!(resolution(&PropertyAssessment::count(5, 0), &cfg), 1.0);
        // 1 - tanh(1), with tanh(1) = (e^2 - 1) / (e^2 + 1).
        let e2 = std::f64::consts::E * std::f64::consts::E;
        let expected = 1.0 - (e2 - 1.0) / (e2 + 1.0);
        let got = resolution(&PropertyAssessment::count(5, 10), &cfg);
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.238_405_84).abs() < 1e-8);
    }

    #[test]
    fn empty_product_is_one() {
        let s = complexity(&problem_with(vec![]), &ResolutionConfig::default()).unwrap();
        assert_eq!(s.h, 1.0);
        assert_eq!(s.k, 0);
        assert!(s.factors.is_empty());
    }

    #[test]
    fn full_resolution_zeroes_the_score() {
        let s = complexity(
            &problem_with(vec![PropertyAssessment::resolution(4, 1.0)]),
            &ResolutionConfig::default(),
        )
        .unwrap();
        assert_eq!(s.h, 0.0);
    }

    #[test]
    fn two_resolutions_multiply() {
        let p = problem_with(vec![
            PropertyAssessment::resolution(9, 0.5),
            PropertyAssessment::resolution(2, 0.2),
        ]);
        let s = complexity(&p, &ResolutionConfig::default()).unwrap();
        assert!((s.h - 0.4).abs() < 1e-15);
        let ids: Vec<u8> = s.factors.iter().map(|f| f.property_id.get()).collect();
        assert_eq!(ids, vec![2, 9]);
    }

    #[test]
    fn five_present_properties() {
        let p = problem_with((1..=5).map(|i| PropertyAssessment::binary(i, true)).collect());
        let s = complexity(&p, &ResolutionConfig::default()).unwrap();
        assert_eq!(s.h, 0.03125);
        assert_eq!(s.k, 5);
    }

    #[test]
    fn closed_form() {
        assert_eq!(complexity_binary(0, 0.3).unwrap(), 1.0);
        assert_eq!(complexity_binary(3, 0.5).unwrap(), 0.125);
        assert_eq!(complexity_binary(14, 1.0).unwrap(), 0.0);
        for c in [0.0, -0.1, 1.1, f64::NAN] {
            assert!(matches!(complexity_binary(2, c), Err(Error::Domain(_))), "{c}");
        }
        assert!(matches!(complexity_binary(15, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_problems_and_configs_are_rejected() {
        let p = problem_with(vec![
            PropertyAssessment::binary(5, true),
            PropertyAssessment::binary(5, true),
        ]);
        assert!(matches!(
            complexity(&p, &ResolutionConfig::default()),
            Err(Error::Invalid(_))
        ));
        let ok = problem_with(vec![]);
        for cfg in [
            ResolutionConfig::with_c(0.0),
            ResolutionConfig {
                count_scale: 0.0,
                ..Default::default()
            },
        ] {
            assert!(matches!(complexity(&ok, &cfg), Err(Error::InvalidConfig(_))));
        }
    }
}
