//! Per-objective extremes and a knee point for a front.
//!
//! Objectives are min-max normalized over the front and oriented so that 1
//! is best. The knee is the member lying farthest beyond the hyperplane
//! through the per-objective best members, on the side of the ideal point.
//! Members at equal distance are separated by their Euclidean distance to the
//! ideal point, then by position in the front.

use serde::{Deserialize, Serialize};

use super::ParetoFront;
use crate::problem::Direction;
use crate::Error;

const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveExtremes {
    pub objective: usize,
    pub direction: Direction,
    pub best_member: usize,
    pub best_value: f64,
    pub worst_member: usize,
    pub worst_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffSummary {
    pub extremes: Vec<ObjectiveExtremes>,
    /// Index of the knee member within the front.
    pub knee_member: usize,
    /// Signed normalized distance of the knee beyond the extreme hyperplane.
    pub knee_distance: f64,
}

pub fn tradeoff_summary(front: &ParetoFront) -> Result<TradeoffSummary, Error> {
    if front.members.is_empty() {
        return Err(Error::EmptyFront);
    }
    let dirs = &front.directions;
    let oriented: Vec<Vec<f64>> = front
        .members
        .iter()
        .map(|m| {
            m.objectives
                .iter()
                .zip(dirs)
                .map(|(&v, d)| if *d == Direction::Maximize { v } else { -v })
                .collect()
        })
        .collect();

    let mut extremes = Vec::with_capacity(dirs.len());
    for (k, &direction) in dirs.iter().enumerate() {
        let best = first_arg(&oriented, k, |a, b| a > b);
        let worst = first_arg(&oriented, k, |a, b| a < b);
        extremes.push(ObjectiveExtremes {
            objective: k,
            direction,
            best_member: best,
            best_value: front.members[best].objectives[k],
            worst_member: worst,
            worst_value: front.members[worst].objectives[k],
        });
    }

    // Objectives with zero spread carry no trade-off information.
    let active: Vec<usize> = extremes
        .iter()
        .filter(|e| {
            let spread = oriented[e.best_member][e.objective] - oriented[e.worst_member][e.objective];
            spread > 0.0 && spread.is_finite()
        })
        .map(|e| e.objective)
        .collect();
    let normalized: Vec<Vec<f64>> = oriented
        .iter()
        .map(|row| {
            active
                .iter()
                .map(|&k| {
                    let lo = oriented[extremes[k].worst_member][k];
                    let hi = oriented[extremes[k].best_member][k];
                    (row[k] - lo) / (hi - lo)
                })
                .collect()
        })
        .collect();

    let anchors: Vec<Vec<f64>> = active
        .iter()
        .map(|&k| normalized[extremes[k].best_member].clone())
        .collect();
    // Hyperplane {f : w.f = 1} through the anchors.
    let plane = solve_linear(anchors, vec![1.0; active.len()]);
    let distance = |f: &[f64]| match &plane {
        Some(w) => {
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            let dot: f64 = w.iter().zip(f).map(|(a, b)| a * b).sum();
            if norm > 0.0 {
                (dot - 1.0) / norm
            } else {
                0.0
            }
        }
        None => 0.0,
    };
    let to_ideal = |f: &[f64]| f.iter().map(|x| (1.0 - x) * (1.0 - x)).sum::<f64>().sqrt();

    let mut knee = 0;
    let mut knee_d = distance(&normalized[0]);
    let mut knee_ideal = to_ideal(&normalized[0]);
    for (i, f) in normalized.iter().enumerate().skip(1) {
        let d = distance(f);
        let ideal = to_ideal(f);
        let wins = if (d - knee_d).abs() <= TIE_EPS {
            ideal < knee_ideal - TIE_EPS
        } else {
            d > knee_d
        };
        if wins {
            knee = i;
            knee_d = d;
            knee_ideal = ideal;
        }
    }

    Ok(TradeoffSummary {
        extremes,
        knee_member: knee,
        knee_distance: knee_d,
    })
}

fn first_arg(rows: &[Vec<f64>], k: usize, improves: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, row) in rows.iter().enumerate().skip(1) {
        if improves(row[k], rows[best][k]) {
            best = i;
        }
    }
    best
}

/// Gaussian elimination with partial pivoting; `None` when singular.
#[allow(clippy::needless_range_loop)]
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    if n == 0 {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = ((row + 1)..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}
