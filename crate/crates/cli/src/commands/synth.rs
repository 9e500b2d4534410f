use std::path::Path;

use legkit_core::fourbar::{sample_schedule, sweep_schedule, Branch};
use legkit_core::search::{
    filter_feasible, pareto_filter, scan, write_table, Constraints, Infeasibility, ParamBox, SampleRecord,
    ScanSettings,
};
use legkit_core::synthesis::reduced_objective;
use serde::{Deserialize, Serialize};

use crate::config::{config_hash, load};
use crate::svg::{Frame, Svg};
use crate::{CliError, Output};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SynthConfig {
    pub bounds: ParamBox,
    /// Number of LP-tau samples.
    pub budget: usize,
    pub scan: ScanSettings,
    /// A design must meet these to be reported as the best one.
    pub requirements: Constraints,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            bounds: ParamBox::default(),
            budget: 1 << 14,
            scan: ScanSettings::default(),
            requirements: Constraints {
                max_delta: f64::INFINITY,
                min_transmission_deg: 24.0,
                min_step_cycle_ratio: 1.55,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestDesign {
    pub index: u32,
    /// `p1..p5`, angles in radians.
    pub params: [f64; 5],
    pub branch: Branch,
    pub delta: f64,
    pub normalized_rms: f64,
    pub mu_min_deg: f64,
    pub nu: f64,
    pub support_arc_deg: f64,
    /// Foot point in the coupler frame.
    pub coupler_point: [f64; 2],
    pub line_start: [f64; 2],
    pub line_displacement: [f64; 2],
    pub rank_deficient: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthSummary {
    pub budget: usize,
    pub evaluated: usize,
    pub invalid_parameters: usize,
    pub sweep_failures: usize,
    pub solve_failures: usize,
    pub meeting_requirements: usize,
    pub pareto: usize,
    /// Smallest normalized RMS deviation among designs meeting the requirements.
    pub best: Option<BestDesign>,
}

fn best_design(record: &SampleRecord) -> Option<BestDesign> {
    let e = record.evaluated()?;
    let s = &e.solution;
    let target = s.target();
    Some(BestDesign {
        index: record.index,
        params: record.params.genome(),
        branch: record.params.branch,
        delta: s.delta,
        normalized_rms: s.normalized_rms(),
        mu_min_deg: e.metrics.min_transmission_deg,
        nu: e.metrics.step_cycle_ratio,
        support_arc_deg: e.metrics.support_arc_deg,
        coupler_point: [s.x[0], s.x[1]],
        line_start: [target.start.x, target.start.y],
        line_displacement: [target.displacement.x, target.displacement.y],
        rank_deficient: s.rank_deficient,
    })
}

/// Runs the scan and writes `table.csv`, `pareto.csv`, `summary.json` and,
/// when a design meets the requirements, `best_trajectory.svg`.
pub fn run(config: &SynthConfig, out: &Output) -> Result<SynthSummary, CliError> {
    config.requirements_valid()?;
    let records = scan(&config.bounds, config.budget, &config.scan).map_err(|e| CliError::Config(e.to_string()))?;
    let admitted = filter_feasible(&records, &config.requirements);
    let front = pareto_filter(&admitted);

    out.csv("table.csv", |buf| write_table(buf, &records).map_err(to_csv_error))?;
    out.csv("pareto.csv", |buf| write_table(buf, front.iter().copied()).map_err(to_csv_error))?;

    let count = |f: fn(&Infeasibility) -> bool| records.iter().filter(|r| r.outcome.as_ref().err().is_some_and(f)).count();
    let best = admitted
        .iter()
        .filter_map(|r| r.evaluated().map(|e| (r, e.solution.normalized_rms())))
        .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.index.cmp(&b.0.index)))
        .map(|(r, _)| *r);
    let summary = SynthSummary {
        budget: config.budget,
        evaluated: records.iter().filter(|r| r.feasible()).count(),
        invalid_parameters: count(|i| matches!(i, Infeasibility::InvalidParameters(_))),
        sweep_failures: count(|i| matches!(i, Infeasibility::Sweep(_))),
        solve_failures: count(|i| matches!(i, Infeasibility::Solve(_))),
        meeting_requirements: admitted.len(),
        pareto: front.len(),
        best: best.and_then(best_design),
    };
    out.json("summary.json", &summary)?;

    let Some(best) = best else {
        return Err(CliError::Infeasible {
            message: "no sampled design meets the requirements".into(),
            diagnostics: serde_json::to_value(&summary).expect("summary serializes"),
        });
    };
    out.svg("best_trajectory.svg", trajectory_plot(best, config))?;
    Ok(summary)
}

impl SynthConfig {
    fn requirements_valid(&self) -> Result<(), CliError> {
        let r = &self.requirements;
        if r.max_delta.is_nan() || !r.min_transmission_deg.is_finite() || !r.min_step_cycle_ratio.is_finite() {
            return Err(CliError::Config("requirements must be numbers".into()));
        }
        Ok(())
    }
}

fn to_csv_error(e: legkit_core::search::SearchError) -> csv::Error {
    match e {
        legkit_core::search::SearchError::Csv(c) => c,
        other => csv::Error::from(std::io::Error::other(other.to_string())),
    }
}

/// Foot path over the support phase against the fitted line, with the rest
/// of the cycle dashed when the linkage assembles there.
fn trajectory_plot(record: &SampleRecord, config: &SynthConfig) -> Svg {
    let eval = reduced_objective(&record.params, &config.scan.sweep).expect("best design was evaluated");
    let local = eval.solution.coupler_point();
    let target = eval.solution.target();
    let support: Vec<(f64, f64)> = eval.poses.iter().map(|p| p.coupler_point(&local)).map(|q| (q.x, q.y)).collect();
    let line: Vec<(f64, f64)> = [0.0, 1.0].iter().map(|&k| target.point_at(k)).map(|q| (q.x, q.y)).collect();
    let p = &record.params;
    let transfer: Vec<(f64, f64)> = sample_schedule(p.start_angle + p.support_arc, std::f64::consts::TAU - p.support_arc, 64)
        .ok()
        .and_then(|s| sweep_schedule(p, &s, config.scan.sweep.continuity_bound).ok())
        .map(|poses| poses.iter().map(|q| q.coupler_point(&local)).map(|q| (q.x, q.y)).collect())
        .unwrap_or_default();

    let all: Vec<(f64, f64)> = support.iter().chain(&line).chain(&transfer).copied().collect();
    let frame = Frame::fit(&all, 70.0, 30.0, 560.0, 420.0, true);
    let mut svg = Svg::new(660.0, 500.0);
    frame.axes(&mut svg, "x / l_AD", "y / l_AD");
    svg.polyline(&frame.map_all(&transfer), "#999", 1.5, true);
    svg.polyline(&frame.map_all(&line), "#d62728", 1.5, false);
    svg.polyline(&frame.map_all(&support), "#1f77b4", 2.0, false);
    for &q in &support {
        svg.circle(frame.map(q), 2.0, "#1f77b4");
    }
    svg.text(
        (70.0, 20.0),
        12.0,
        "start",
        &format!("sample {}: foot path (blue) vs fitted line (red), transfer phase dashed", record.index),
    );
    svg
}

pub fn main(config_path: Option<&Path>, out_dir: &Path) -> Result<SynthSummary, CliError> {
    let config: SynthConfig = load(config_path)?;
    let out = Output::create(out_dir, "synth", config_hash(&config))?;
    run(&config, &out)
}
