//! Leg synthesis as a two-objective problem: foot-path error against
//! transmission quality.

use std::io;

use serde::{Deserialize, Serialize};

use super::{EvolutionResult, Problem};
use crate::fourbar::{assembly_violation, force_ratio_angle, Branch, FourBarParams};
use crate::search::{Infeasibility, ParamBox};
use crate::synthesis::{reduced_objective, ReducedEvaluation, SweepSettings};

/// Objective value given to genomes that cannot be evaluated.
pub const LEG_SENTINEL: f64 = f64::MAX;

/// Violation floor for sweeps that fail without a closure gap
/// (branch jumps, change points, singular solves).
const FAILED_SWEEP_VIOLATION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransmissionMetric {
    /// Smallest coupler/rocker transmission angle over the sweep.
    #[default]
    Classical,
    /// Smallest force-ratio angle of the coupler force over the sweep.
    ForceRatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LegObjectives {
    /// Mean squared distance between the foot and its target line.
    pub epsilon: f64,
    /// Transmission metric in radians, to be maximized.
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LegProblem {
    lower: Vec<f64>,
    upper: Vec<f64>,
    pub sweep: SweepSettings,
    pub branch: Branch,
    pub metric: TransmissionMetric,
}

impl LegProblem {
    pub fn new(bounds: &ParamBox, sweep: SweepSettings, branch: Branch, metric: TransmissionMetric) -> Self {
        Self { lower: bounds.lower.to_vec(), upper: bounds.upper.to_vec(), sweep, branch, metric }
    }

    /// Both objectives for `genome = (p1..p5)`, with the coupler point and
    /// stroke line taken from the inner least-squares solve.
    pub fn leg_objectives(&self, genome: &[f64]) -> Result<(LegObjectives, ReducedEvaluation), Infeasibility> {
        let params = FourBarParams::from_genome(genome, self.branch)
            .map_err(|e| Infeasibility::InvalidParameters(e.to_string()))?;
        let eval = reduced_objective(&params, &self.sweep)?;
        let local = eval.solution.coupler_point();
        let target = eval.solution.target();
        let squared: f64 = eval
            .poses
            .iter()
            .zip(&eval.schedule.weights)
            .map(|(pose, &k)| (pose.coupler_point(&local) - target.point_at(k)).norm_squared())
            .sum();
        let epsilon = squared / eval.poses.len() as f64;
        let mu = match self.metric {
            TransmissionMetric::Classical => {
                eval.poses.iter().map(|p| p.transmission).fold(f64::INFINITY, f64::min)
            }
            TransmissionMetric::ForceRatio => eval
                .poses
                .iter()
                .map(|p| force_ratio_angle(p).unwrap_or(0.0))
                .fold(f64::INFINITY, f64::min),
        };
        if !(epsilon.is_finite() && mu.is_finite()) {
            return Err(Infeasibility::Solve("non-finite objectives".into()));
        }
        Ok((LegObjectives { epsilon, mu }, eval))
    }

    /// Positive constraint violation of a genome that failed to evaluate.
    fn failure_violation(&self, genome: &[f64]) -> f64 {
        match FourBarParams::from_genome(genome, self.branch) {
            Ok(params) => {
                let gap = params
                    .schedule(self.sweep.samples)
                    .map(|s| assembly_violation(&params, &s))
                    .unwrap_or(0.0);
                FAILED_SWEEP_VIOLATION + gap
            }
            Err(_) => 1.0,
        }
    }
}

impl Problem for LegProblem {
    fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }

    fn upper_bounds(&self) -> &[f64] {
        &self.upper
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn objectives(&self, genome: &[f64]) -> Vec<f64> {
        self.evaluate(genome).0
    }

    fn evaluate(&self, genome: &[f64]) -> (Vec<f64>, f64) {
        match self.leg_objectives(genome) {
            Ok((obj, _)) => (vec![obj.epsilon, -obj.mu], 0.0),
            Err(_) => (vec![LEG_SENTINEL, LEG_SENTINEL], self.failure_violation(genome)),
        }
    }
}

/// Per-generation CSV: generation, hypervolumes, best ε and best μ (degrees).
pub fn write_trace<W: io::Write>(writer: W, result: &EvolutionResult) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record([
        "generation",
        "hypervolume",
        "normalized_hypervolume",
        "front_hypervolume",
        "best_epsilon",
        "best_mu_deg",
    ])?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for s in &result.trace {
        let best_eps = s.best.first().copied().filter(|v| v.is_finite());
        let best_mu = s.best.get(1).copied().filter(|v| v.is_finite()).map(|v| (-v).to_degrees());
        out.write_record([
            s.generation.to_string(),
            opt(s.hypervolume),
            opt(s.normalized_hypervolume),
            opt(s.front_hypervolume),
            opt(best_eps),
            opt(best_mu),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Feasible rank-0 members of the final population: genome then objectives.
pub fn write_front<W: io::Write>(writer: W, result: &EvolutionResult) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    out.write_record(["p1", "p2", "p3", "p4", "p5", "epsilon", "mu_deg"])?;
    let mut front = result.front();
    front.sort_by(|a, b| a.objectives[0].total_cmp(&b.objectives[0]));
    for ind in front {
        let mut row: Vec<String> = ind.genome.iter().map(|g| g.to_string()).collect();
        row.push(ind.objectives[0].to_string());
        row.push((-ind.objectives[1]).to_degrees().to_string());
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}
