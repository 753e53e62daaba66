//! Seeded evolutionary search over continuous decision variables.
//!
//! Each generation recombines tournament-selected parents with blend
//! crossover (BLX-0.5), applies Gaussian mutation scaled to each variable's
//! range, clamps to bounds, and keeps the best half of parents plus
//! offspring by constrained nondominated rank and crowding distance. Every
//! feasible point ever evaluated goes into an archive; the returned front is
//! the nondominated filter of that archive.
//!
//! The random stream is ChaCha8 seeded from `SearchConfig::seed`, so a run is
//! fully determined by the problem and the config.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{pareto_filter, ParetoFront};
use crate::problem::{ActionKind, CandidateSolution, DecisionProblem, Direction};
use crate::Error;

const BLEND_ALPHA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchConfig {
    pub population: usize,
    pub generations: usize,
    pub seed: u64,
    /// Per-variable mutation probability.
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of each variable's range.
    pub mutation_sigma_fraction: f64,
    /// Probability that a parent pair is recombined rather than copied.
    pub crossover_rate: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            population: 64,
            generations: 100,
            seed: 0,
            mutation_rate: 0.1,
            mutation_sigma_fraction: 0.05,
            crossover_rate: 0.9,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        SearchConfig {
            seed,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.population < 4 || !self.population.is_multiple_of(2) {
            return bad(format!(
                "population must be an even number >= 4, got {}",
                self.population
            ));
        }
        if self.generations == 0 {
            return bad("generations must be positive".into());
        }
        for (name, rate) in [
            ("mutation_rate", self.mutation_rate),
            ("crossover_rate", self.crossover_rate),
            ("mutation_sigma_fraction", self.mutation_sigma_fraction),
        ] {
            if !(0.0..=1.0).contains(&rate) {
                return bad(format!("{name} must lie in [0, 1], got {rate}"));
            }
        }
        Ok(())
    }

    /// Total number of point evaluations the search performs.
    pub fn evaluations(&self) -> u64 {
        (self.population as u64).saturating_mul(self.generations as u64 + 1)
    }
}

struct Individual {
    x: Vec<f64>,
    /// Objectives turned into maximization.
    oriented: Vec<f64>,
    /// Sum of positive slacks; zero iff feasible.
    violation: f64,
    rank: usize,
    crowding: f64,
}

pub fn solve_continuous(problem: &DecisionProblem, config: &SearchConfig) -> Result<ParetoFront, Error> {
    problem.ensure_valid()?;
    config.validate()?;
    if problem.action_space.kind != ActionKind::Continuous {
        return Err(Error::KindMismatch {
            expected: ActionKind::Continuous,
        });
    }
    let vars = &problem.action_space.variables;
    let directions = problem.directions();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut archive: Vec<CandidateSolution> = Vec::new();

    let evaluate = |x: Vec<f64>, archive: &mut Vec<CandidateSolution>| -> Result<Individual, Error> {
        let cand = problem.evaluate_point(&x)?;
        let ind = Individual {
            oriented: orient(&cand.objectives, &directions),
            violation: cand.constraint_slacks.iter().map(|s| s.max(0.0)).sum(),
            x,
            rank: 0,
            crowding: 0.0,
        };
        if cand.feasible {
            archive.push(cand);
        }
        Ok(ind)
    };

    let mut population = Vec::with_capacity(config.population);
    for _ in 0..config.population {
        let x = vars.iter().map(|v| rng.random_range(v.lower..=v.upper)).collect();
        population.push(evaluate(x, &mut archive)?);
    }
    assign_rank_and_crowding(&mut population);

    for _ in 0..config.generations {
        let mut offspring = Vec::with_capacity(config.population);
        while offspring.len() < config.population {
            let a = &population[tournament(&population, &mut rng)];
            let b = &population[tournament(&population, &mut rng)];
            let (mut c1, mut c2) = (a.x.clone(), b.x.clone());
            if rng.random::<f64>() < config.crossover_rate {
                for (j, v) in vars.iter().enumerate() {
                    let (lo, hi) = (a.x[j].min(b.x[j]), a.x[j].max(b.x[j]));
                    let spread = BLEND_ALPHA * (hi - lo);
                    c1[j] = blend(&mut rng, lo - spread, hi + spread).clamp(v.lower, v.upper);
                    c2[j] = blend(&mut rng, lo - spread, hi + spread).clamp(v.lower, v.upper);
                }
            }
            for child in [&mut c1, &mut c2] {
                for (j, v) in vars.iter().enumerate() {
                    if rng.random::<f64>() < config.mutation_rate {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        child[j] = (child[j] + z * config.mutation_sigma_fraction * v.range()).clamp(v.lower, v.upper);
                    }
                }
            }
            offspring.push(evaluate(c1, &mut archive)?);
            offspring.push(evaluate(c2, &mut archive)?);
        }
        population.extend(offspring);
        assign_rank_and_crowding(&mut population);
        population.sort_by(better);
        population.truncate(config.population);
        assign_rank_and_crowding(&mut population);
    }

    Ok(pareto_filter(archive, &directions)?.warn_if_empty("point was found"))
}

fn blend(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn orient(objectives: &[f64], directions: &[Direction]) -> Vec<f64> {
    objectives
        .iter()
        .zip(directions)
        .map(|(&v, d)| match d {
            Direction::Maximize => v,
            Direction::Minimize => -v,
        })
        .collect()
}

/// Binary tournament on the crowded comparison.
fn tournament(population: &[Individual], rng: &mut ChaCha8Rng) -> usize {
    let i = rng.random_range(0..population.len());
    let j = rng.random_range(0..population.len());
    if better(&population[j], &population[i]) == Ordering::Less {
        j
    } else {
        i
    }
}

/// `Less` when `a` should be preferred to `b`: lower rank, then wider
/// crowding. Infeasible individuals rank after every feasible one.
fn better(a: &Individual, b: &Individual) -> Ordering {
    a.rank.cmp(&b.rank).then_with(|| b.crowding.total_cmp(&a.crowding))
}

/// Constrained dominance: feasible beats infeasible, lower violation beats
/// higher, and among feasible points ordinary Pareto dominance applies.
fn constrained_dominates(a: &Individual, b: &Individual) -> bool {
    match (a.violation == 0.0, b.violation == 0.0) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.violation < b.violation,
        (true, true) => {
            let mut strictly = false;
            for (x, y) in a.oriented.iter().zip(&b.oriented) {
                match x.total_cmp(y) {
                    Ordering::Less => return false,
                    Ordering::Greater => strictly = true,
                    Ordering::Equal => {}
                }
            }
            strictly
        }
    }
}

fn assign_rank_and_crowding(population: &mut [Individual]) {
    let n = population.len();
    let mut dominated_by_count = vec![0usize; n];
    let mut dominates_list: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if constrained_dominates(&population[i], &population[j]) {
                dominates_list[i].push(j);
                dominated_by_count[j] += 1;
            } else if constrained_dominates(&population[j], &population[i]) {
                dominates_list[j].push(i);
                dominated_by_count[i] += 1;
            }
        }
    }
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by_count[i] == 0).collect();
    let mut rank = 0;
    while !current.is_empty() {
        for &i in &current {
            population[i].rank = rank;
        }
        crowding(population, &current);
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominates_list[i] {
                dominated_by_count[j] -= 1;
                if dominated_by_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        current = next;
        rank += 1;
    }
}

fn crowding(population: &mut [Individual], front: &[usize]) {
    for &i in front {
        population[i].crowding = 0.0;
    }
    if front.len() <= 2 {
        for &i in front {
            population[i].crowding = f64::INFINITY;
        }
        return;
    }
    let m = population[front[0]].oriented.len();
    let mut sorted = front.to_vec();
    for k in 0..m {
        sorted.sort_by(|&a, &b| {
            population[a].oriented[k]
                .total_cmp(&population[b].oriented[k])
                .then(a.cmp(&b))
        });
        let lo = population[sorted[0]].oriented[k];
        let hi = population[sorted[sorted.len() - 1]].oriented[k];
        population[sorted[0]].crowding = f64::INFINITY;
        population[sorted[sorted.len() - 1]].crowding = f64::INFINITY;
        let span = hi - lo;
        if !(span > 0.0 && span.is_finite()) {
            continue;
        }
        for w in 1..sorted.len() - 1 {
            let gap = population[sorted[w + 1]].oriented[k] - population[sorted[w - 1]].oriented[k];
            population[sorted[w]].crowding += gap / span;
        }
    }
}
