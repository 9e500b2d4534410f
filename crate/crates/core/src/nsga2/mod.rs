//! Elitist multi-objective genetic search (NSGA-II) with hypervolume tracking.

mod compare;
mod hypervolume;
mod leg;
mod operators;
mod sort;

pub use compare::{compare_fronts, FrontComparison};
pub use hypervolume::{exclusive_contribution, hypervolume_2d, nondominated_2d, Hypervolume};
pub use leg::{
    write_front, write_trace, LegObjectives, LegProblem, TransmissionMetric, LEG_SENTINEL,
};
pub use operators::{polynomial_mutation, sbx, tournament};
pub use sort::{constrained_dominates, crowded_order, crowding_distance, fast_nondominated_sort};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance below which an equality constraint counts as satisfied.
pub const EQUALITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolveError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

/// Inequality (`g ≤ 0`) and equality (`h = 0`) constraint values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstraintValues {
    pub inequality: Vec<f64>,
    pub equality: Vec<f64>,
}

impl ConstraintValues {
    pub fn violation(&self) -> f64 {
        let g: f64 = self.inequality.iter().map(|&g| g.max(0.0)).sum();
        let h: f64 = self.equality.iter().map(|&h| (h.abs() - EQUALITY_TOLERANCE).max(0.0)).sum();
        g + h
    }
}

/// A box-bounded minimization problem. Evaluators must be pure.
pub trait Problem: Sync {
    fn lower_bounds(&self) -> &[f64];
    fn upper_bounds(&self) -> &[f64];
    fn num_objectives(&self) -> usize;
    fn objectives(&self, genome: &[f64]) -> Vec<f64>;

    fn constraints(&self, _genome: &[f64]) -> ConstraintValues {
        ConstraintValues::default()
    }

    fn dimension(&self) -> usize {
        self.lower_bounds().len()
    }

    /// Objectives and total constraint violation in one call; implementors
    /// may override to share work between the two.
    fn evaluate(&self, genome: &[f64]) -> (Vec<f64>, f64) {
        (self.objectives(genome), self.constraints(genome).violation())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genome: Vec<f64>,
    pub objectives: Vec<f64>,
    pub violation: f64,
    pub rank: usize,
    pub crowding: f64,
}

impl Individual {
    pub fn evaluated(genome: Vec<f64>, objectives: Vec<f64>, violation: f64) -> Self {
        Self { genome, objectives, violation, rank: 0, crowding: 0.0 }
    }

    pub fn is_feasible(&self) -> bool {
        self.violation <= 0.0
    }

    fn objective_pair(&self) -> Option<[f64; 2]> {
        match self.objectives.as_slice() {
            &[a, b] if self.is_feasible() && a.is_finite() && b.is_finite() => Some([a, b]),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaConfig {
    pub population: usize,
    /// Generation count, the initial population included.
    pub generations: usize,
    pub crossover_probability: f64,
    pub crossover_eta: f64,
    /// Per-variable mutation probability; `None` means `1 / dimension`.
    pub mutation_probability: Option<f64>,
    pub mutation_eta: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population: 100,
            generations: 250,
            crossover_probability: 0.9,
            crossover_eta: 15.0,
            mutation_probability: None,
            mutation_eta: 20.0,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), EvolveError> {
        let bad = |msg: String| Err(EvolveError::InvalidConfig(msg));
        if self.population < 4 || self.population % 2 != 0 {
            return bad(format!("population must be even and at least 4, got {}", self.population));
        }
        if self.generations == 0 {
            return bad("generations must be at least 1".into());
        }
        let probabilities =
            [Some(self.crossover_probability), self.mutation_probability].into_iter().flatten();
        for p in probabilities {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("probability {p} outside [0, 1]"));
            }
        }
        for eta in [self.crossover_eta, self.mutation_eta] {
            if !(eta.is_finite() && eta >= 0.0) {
                return bad(format!("distribution index {eta} must be finite and non-negative"));
            }
        }
        Ok(())
    }
}

/// Hypervolume bookkeeping for one generation (two-objective problems only).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationStats {
    /// 1-based; generation 1 is the evaluated initial population.
    pub generation: usize,
    pub feasible: usize,
    /// Hypervolume of every feasible point seen so far.
    pub hypervolume: Option<f64>,
    /// `hypervolume` divided by its final value.
    pub normalized_hypervolume: Option<f64>,
    /// Hypervolume of the current population's feasible rank-0 members.
    pub front_hypervolume: Option<f64>,
    /// Per-objective minimum over feasible members.
    pub best: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub population: Vec<Individual>,
    pub trace: Vec<GenerationStats>,
    /// Nadir of the first feasible generation, frozen for the whole run.
    pub reference_point: Option<[f64; 2]>,
    /// Nondominated feasible objective vectors found over the run.
    pub archive: Vec<[f64; 2]>,
}

impl EvolutionResult {
    /// Feasible rank-0 members of the final population.
    pub fn front(&self) -> Vec<&Individual> {
        self.population.iter().filter(|i| i.rank == 0 && i.is_feasible()).collect()
    }
}

fn evaluate_all<P: Problem>(problem: &P, genomes: Vec<Vec<f64>>) -> Vec<Individual> {
    let m = problem.num_objectives();
    genomes
        .into_par_iter()
        .map(|genome| {
            let (objectives, violation) = problem.evaluate(&genome);
            let sane = objectives.len() == m
                && objectives.iter().all(|v| v.is_finite())
                && !violation.is_nan()
                && violation >= 0.0;
            if sane {
                Individual::evaluated(genome, objectives, violation)
            } else {
                Individual::evaluated(genome, vec![f64::INFINITY; m], f64::INFINITY)
            }
        })
        .collect()
}

/// Assigns ranks and crowding distances to the whole population and returns
/// its fronts.
fn rank_population(population: &mut [Individual]) -> Vec<Vec<usize>> {
    let fronts = fast_nondominated_sort(population);
    for (rank, front) in fronts.iter().enumerate() {
        let objs: Vec<&[f64]> = front.iter().map(|&i| population[i].objectives.as_slice()).collect();
        let crowding = crowding_distance(&objs);
        for (&i, d) in front.iter().zip(crowding) {
            population[i].rank = rank;
            population[i].crowding = d;
        }
    }
    fronts
}

/// Elitist truncation: whole fronts first, the last one by crowding distance.
fn truncate(mut combined: Vec<Individual>, size: usize) -> Vec<Individual> {
    let fronts = rank_population(&mut combined);
    let mut keep = Vec::with_capacity(size);
    for mut front in fronts {
        if keep.len() + front.len() <= size {
            keep.extend(front);
        } else {
            front.sort_by(|&a, &b| combined[b].crowding.total_cmp(&combined[a].crowding).then(a.cmp(&b)));
            keep.extend(front.into_iter().take(size - keep.len()));
        }
        if keep.len() == size {
            break;
        }
    }
    keep.sort_unstable();
    let mut slots: Vec<Option<Individual>> = combined.into_iter().map(Some).collect();
    keep.into_iter().map(|i| slots[i].take().expect("index kept once")).collect()
}

struct Tracker {
    two_objective: bool,
    reference: Option<[f64; 2]>,
    archive: Vec<[f64; 2]>,
    /// Archive hypervolume, grown by exclusive contributions.
    area: f64,
    trace: Vec<GenerationStats>,
}

impl Tracker {
    fn record(&mut self, generation: usize, population: &[Individual]) {
        let feasible: Vec<&Individual> = population.iter().filter(|i| i.is_feasible()).collect();
        let m = population.first().map_or(0, |i| i.objectives.len());
        let best = (0..m)
            .map(|k| feasible.iter().map(|i| i.objectives[k]).fold(f64::INFINITY, f64::min))
            .collect();
        let (mut hypervolume, mut front_hypervolume) = (None, None);
        if self.two_objective {
            let pairs: Vec<[f64; 2]> = feasible.iter().filter_map(|i| i.objective_pair()).collect();
            if self.reference.is_none() && !pairs.is_empty() {
                let nadir = pairs.iter().fold([f64::NEG_INFINITY; 2], |acc, p| {
                    [acc[0].max(p[0]), acc[1].max(p[1])]
                });
                self.reference = Some(nadir);
            }
            if let Some(reference) = self.reference {
                // Recomputing the area from scratch can lose an ulp between
                // generations; summing the new points' exclusive areas cannot.
                let mut current = self.archive.clone();
                for p in &pairs {
                    let gain = exclusive_contribution(*p, &current, reference);
                    if gain > 0.0 {
                        self.area += gain;
                        current.push(*p);
                        current = nondominated_2d(&current);
                    }
                }
            }
            let mut merged = std::mem::take(&mut self.archive);
            merged.extend_from_slice(&pairs);
            self.archive = nondominated_2d(&merged);
            if let Some(reference) = self.reference {
                hypervolume = Some(self.area);
                let rank0: Vec<[f64; 2]> = feasible
                    .iter()
                    .filter(|i| i.rank == 0)
                    .filter_map(|i| i.objective_pair())
                    .collect();
                front_hypervolume = Some(hypervolume_2d(&rank0, reference).area);
            }
        }
        self.trace.push(GenerationStats {
            generation,
            feasible: feasible.len(),
            hypervolume,
            normalized_hypervolume: None,
            front_hypervolume,
            best,
        });
    }

    fn finish(mut self, population: Vec<Individual>) -> EvolutionResult {
        let last = self.trace.last().and_then(|s| s.hypervolume).unwrap_or(0.0);
        for stats in &mut self.trace {
            stats.normalized_hypervolume =
                stats.hypervolume.map(|hv| if last > 0.0 { hv / last } else { 0.0 });
        }
        EvolutionResult {
            population,
            trace: self.trace,
            reference_point: self.reference,
            archive: self.archive,
        }
    }
}

/// Runs NSGA-II. Deterministic for a given seed regardless of thread count:
/// random numbers are drawn only while breeding, evaluation runs in parallel.
pub fn evolve<P: Problem>(problem: &P, config: &GaConfig) -> Result<EvolutionResult, EvolveError> {
    config.validate()?;
    let lower = problem.lower_bounds();
    let upper = problem.upper_bounds();
    let dim = lower.len();
    if dim == 0 || upper.len() != dim {
        return Err(EvolveError::InvalidProblem("bounds must be nonempty and equally long".into()));
    }
    if lower.iter().zip(upper).any(|(l, u)| !(l.is_finite() && u.is_finite() && l <= u)) {
        return Err(EvolveError::InvalidProblem("every lower bound must not exceed its upper bound".into()));
    }
    if problem.num_objectives() < 2 {
        return Err(EvolveError::InvalidProblem("at least two objectives are required".into()));
    }
    let mutation_probability = config.mutation_probability.unwrap_or(1.0 / dim as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    use rand::Rng;
    let initial: Vec<Vec<f64>> = (0..config.population)
        .map(|_| lower.iter().zip(upper).map(|(&l, &u)| l + (u - l) * rng.random::<f64>()).collect())
        .collect();
    let mut population = evaluate_all(problem, initial);
    rank_population(&mut population);

    let mut tracker = Tracker {
        two_objective: problem.num_objectives() == 2,
        reference: None,
        archive: Vec::new(),
        area: 0.0,
        trace: Vec::with_capacity(config.generations),
    };
    tracker.record(1, &population);

    for generation in 2..=config.generations {
        let mut offspring = Vec::with_capacity(config.population);
        while offspring.len() < config.population {
            let a = tournament(&population, &mut rng);
            let b = tournament(&population, &mut rng);
            let (mut c1, mut c2) = sbx(
                &a.genome,
                &b.genome,
                lower,
                upper,
                config.crossover_probability,
                config.crossover_eta,
                &mut rng,
            );
            polynomial_mutation(&mut c1, lower, upper, mutation_probability, config.mutation_eta, &mut rng);
            polynomial_mutation(&mut c2, lower, upper, mutation_probability, config.mutation_eta, &mut rng);
            offspring.push(c1);
            offspring.push(c2);
        }
        let mut combined = population;
        combined.extend(evaluate_all(problem, offspring));
        population = truncate(combined, config.population);
        tracker.record(generation, &population);
    }
    Ok(tracker.finish(population))
}
