//! Combined analysis reports, rendered as JSON or markdown.

use std::fmt::Write as _;

use serde::Serialize;

use crate::io::to_canonical_json;
use crate::moo::{self, ParetoFront, SearchConfig, TradeoffSummary};
use crate::problem::{DecisionProblem, Direction, Origin};
use crate::recommend::{gap_report, recommend, GapReport, Recommendation};
use crate::scoring::{complexity, ComplexityScore, ResolutionConfig};
use crate::taxonomy::catalog;
use crate::Error;

pub const HARDEST_NUT_ADVISORY: &str = "No catalogued pivotal property applies to this problem, so no \
catalogued strategy can be recommended. This is a hardest nut: look for problem-specific properties, or \
restructure the problem until one of the catalogued properties holds.";

pub const SELECTION_ADVISORY: &str = "Ranking is by the summed resolution of each strategy's enabling \
properties. Treat it as a shortlist: choosing between close candidates is a judgement call informed by \
experience, analogous cases and applicable standards.";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub problem_id: String,
    pub title: String,
    pub complexity: ComplexityScore,
    pub recommendations: Vec<Recommendation>,
    pub gaps: GapReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub front: Option<ParetoFront>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tradeoff: Option<TradeoffSummary>,
    #[serde(skip)]
    pub metric_names: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderTarget {
    Json,
    Markdown,
}

/// Runs scoring, recommendation and (when `search` is given) optimization.
pub fn build_report(
    problem: &DecisionProblem,
    config: &ResolutionConfig,
    top: Option<usize>,
    search: Option<&SearchConfig>,
) -> Result<Report, Error> {
    let score = complexity(problem, config)?;
    let recommendations = recommend(problem, config, top)?;
    let gaps = gap_report(problem, config)?;
    let (front, tradeoff) = match search {
        Some(search) => {
            let front = moo::solve(problem, search)?;
            let tradeoff = if front.is_empty() {
                None
            } else {
                Some(moo::tradeoff_summary(&front)?)
            };
            (Some(front), tradeoff)
        }
        None => (None, None),
    };
    Ok(Report {
        problem_id: problem.id.clone(),
        title: problem.title.clone(),
        complexity: score,
        recommendations,
        gaps,
        front,
        tradeoff,
        metric_names: problem.metrics().map(|m| m.id.clone()).collect(),
    })
}

pub fn render_report(report: &Report, target: RenderTarget) -> String {
    match target {
        RenderTarget::Json => to_canonical_json(report),
        RenderTarget::Markdown => render_markdown(report),
    }
}

/// Formats a real with six significant digits, dropping trailing zeros.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let text = if (-5..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, exponent) = s.split_once('e').expect("exponent form");
        format!("{}e{exponent}", trim_zeros(mantissa.to_owned()))
    };
    // Rounding can carry into a new digit (9.999999 -> 10.00000); reformat.
    if text
        .trim_start_matches('-')
        .replace('.', "")
        .trim_start_matches('0')
        .len()
        > 6
        && !text.contains('e')
    {
        return sig6(text.parse().expect("formatted real"));
    }
    text
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

fn origin_label(origin: &Origin) -> String {
    match origin {
        Origin::Action(id) => id.clone(),
        Origin::Point(x) => format!("({})", x.iter().map(|v| sig6(*v)).collect::<Vec<_>>().join(", ")),
    }
}

fn render_markdown(report: &Report) -> String {
    let mut out = format!("# {} (`{}`)\n\n", report.title, report.problem_id);
    out.push_str(&complexity_section(&report.complexity));
    out.push_str(&recommendations_section(&report.recommendations));
    out.push_str(&gaps_section(&report.gaps));
    if let Some(front) = &report.front {
        out.push_str(&front_section(front, report.tradeoff.as_ref(), &report.metric_names));
    }
    out
}

pub fn complexity_section(score: &ComplexityScore) -> String {
    let cat = catalog();
    let mut out = String::new();
    let _ = writeln!(out, "## Analytical complexity\n");
    let _ = writeln!(out, "H = {}\n", sig6(score.h));
    let _ = writeln!(out, "Resolving properties: k = {}\n", score.k);
    if !score.factors.is_empty() {
        let _ = writeln!(out, "| # | Property | R | 1 - R |");
        let _ = writeln!(out, "|---|----------|---|-------|");
        for f in &score.factors {
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} |",
                f.property_id,
                cat.property(f.property_id).name,
                sig6(f.resolution),
                sig6(f.factor)
            );
        }
        out.push('\n');
    }
    out
}

pub fn recommendations_section(recommendations: &[Recommendation]) -> String {
    let cat = catalog();
    let mut out = String::new();
    let _ = writeln!(out, "## Recommended strategies\n");
    if recommendations.is_empty() {
        let _ = writeln!(out, "{HARDEST_NUT_ADVISORY}\n");
    } else {
        for (i, r) in recommendations.iter().enumerate() {
            let via = r
                .supporting_properties
                .iter()
                .map(|s| format!("{} {}", s.property_id, cat.property(s.property_id).name))
                .collect::<Vec<_>>()
                .join("; ");
            let _ = writeln!(
                out,
                "{}. {} (score {}; via {})",
                i + 1,
                r.strategy.name,
                sig6(r.score),
                via
            );
        }
        let _ = writeln!(out, "\n{SELECTION_ADVISORY}\n");
    }
    out
}

pub fn gaps_section(gaps: &GapReport) -> String {
    let cat = catalog();
    let mut out = String::new();
    let _ = writeln!(out, "## Absent properties\n");
    if gaps.absent_properties.is_empty() {
        let _ = writeln!(out, "None: every catalogued property contributes.\n");
    } else {
        for id in &gaps.absent_properties {
            let _ = writeln!(out, "- {} {}", id, cat.property(*id).name);
        }
        out.push('\n');
    }
    out
}

/// The front as a table plus its trade-off summary. `metric_names` labels
/// the objective columns.
pub fn front_section(front: &ParetoFront, tradeoff: Option<&TradeoffSummary>, metric_names: &[String]) -> String {
    let label = |k: usize| metric_names.get(k).cloned().unwrap_or_else(|| format!("f{}", k + 1));
    let mut out = String::new();
    let _ = writeln!(out, "## Pareto front\n");
    if front.is_empty() {
        let _ = writeln!(out, "No feasible candidate was found.\n");
    } else {
        let header: Vec<String> = front
            .directions
            .iter()
            .enumerate()
            .map(|(k, d)| {
                format!(
                    "{} ({})",
                    label(k),
                    if *d == Direction::Maximize { "max" } else { "min" }
                )
            })
            .collect();
        let _ = writeln!(out, "| # | origin | {} |", header.join(" | "));
        let _ = writeln!(out, "|---|--------|{}", "---|".repeat(header.len()));
        for (i, m) in front.members.iter().enumerate() {
            let values: Vec<String> = m.objectives.iter().map(|v| sig6(*v)).collect();
            let _ = writeln!(out, "| {} | {} | {} |", i, origin_label(&m.origin), values.join(" | "));
        }
        out.push('\n');
    }
    for w in &front.warnings {
        let _ = writeln!(out, "Warning: {w}\n");
    }
    if let Some(t) = tradeoff {
        let _ = writeln!(out, "## Trade-offs\n");
        for e in &t.extremes {
            let _ = writeln!(
                out,
                "- {}: best {} (member {}), worst {} (member {})",
                label(e.objective),
                sig6(e.best_value),
                e.best_member,
                sig6(e.worst_value),
                e.worst_member
            );
        }
        let knee = &front.members[t.knee_member];
        let _ = writeln!(
            out,
            "- knee: member {} at {} with objectives ({})",
            t.knee_member,
            origin_label(&knee.origin),
            knee.objectives.iter().map(|v| sig6(*v)).collect::<Vec<_>>().join(", ")
        );
    }
    out
}
