use std::path::{Path, PathBuf};

use legkit_core::fourbar::Branch;
use legkit_core::nsga2::{
    compare_fronts, evolve, nondominated_2d, write_front, write_trace, EvolutionResult, EvolveError, FrontComparison,
    GaConfig, LegProblem, TransmissionMetric,
};
use legkit_core::search::{read_table, ParamBox};
use legkit_core::synthesis::SweepSettings;
use serde::{Deserialize, Serialize};

use crate::config::{config_hash, load, resolve};
use crate::svg::{Frame, Svg};
use crate::{CliError, Output};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParetoConfig {
    pub bounds: ParamBox,
    pub sweep: SweepSettings,
    pub branch: Branch,
    pub metric: TransmissionMetric,
    pub ga: GaConfig,
    /// Sampling table from `synth` to compare the final front against.
    /// Relative paths are taken from the config file's directory.
    pub sampling_table: Option<PathBuf>,
}

impl Default for ParetoConfig {
    fn default() -> Self {
        Self {
            bounds: ParamBox::default(),
            sweep: SweepSettings::default(),
            branch: Branch::Positive,
            metric: TransmissionMetric::Classical,
            ga: GaConfig::default(),
            sampling_table: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoSummary {
    pub generations: usize,
    pub population: usize,
    pub final_hypervolume: Option<f64>,
    /// Hypervolume reference point `[ε, -μ]`.
    pub reference_point: Option<[f64; 2]>,
    pub front_size: usize,
    pub archive_size: usize,
    /// Normalized hypervolume never decreases between generations.
    pub monotone: bool,
    /// First generation whose normalized hypervolume reaches 0.99.
    pub generation_at_99: Option<usize>,
    /// Final front against the nondominated sampling-table designs.
    pub overlap: Option<FrontComparison>,
}

pub fn summarize(result: &EvolutionResult, population: usize) -> ParetoSummary {
    let normalized: Vec<f64> = result.trace.iter().filter_map(|s| s.normalized_hypervolume).collect();
    ParetoSummary {
        generations: result.trace.len(),
        population,
        final_hypervolume: result.trace.last().and_then(|s| s.hypervolume),
        reference_point: result.reference_point,
        front_size: result.front().len(),
        archive_size: result.archive.len(),
        monotone: normalized.windows(2).all(|w| w[1] >= w[0]),
        generation_at_99: result
            .trace
            .iter()
            .find(|s| s.normalized_hypervolume.is_some_and(|h| h >= 0.99))
            .map(|s| s.generation),
        overlap: None,
    }
}

/// Nondominated `[δ, -μ]` points (μ in radians) of the evaluated table rows.
fn table_front(path: &Path) -> Result<Vec<[f64; 2]>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let rows = read_table(file).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let points: Vec<[f64; 2]> = rows
        .iter()
        .filter_map(|r| Some([r.delta?, -r.mu_min_deg?.to_radians()]))
        .collect();
    Ok(nondominated_2d(&points))
}

/// Runs NSGA-II and writes `hypervolume.csv`, `hypervolume.svg`,
/// `front.csv`, `front.svg` and `summary.json`.
pub fn run(config: &ParetoConfig, table: Option<&Path>, out: &Output) -> Result<ParetoSummary, CliError> {
    config.bounds.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let reference = table.map(table_front).transpose()?;
    let problem = LegProblem::new(&config.bounds, config.sweep, config.branch, config.metric);
    let result = evolve(&problem, &config.ga).map_err(|e| match e {
        EvolveError::InvalidConfig(m) | EvolveError::InvalidProblem(m) => CliError::Config(m),
    })?;

    out.csv("hypervolume.csv", |buf| write_trace(buf, &result))?;
    out.csv("front.csv", |buf| write_front(buf, &result))?;
    out.svg("hypervolume.svg", hypervolume_plot(&result))?;

    let front: Vec<[f64; 2]> = result.front().iter().map(|i| [i.objectives[0], i.objectives[1]]).collect();
    let mut summary = summarize(&result, config.ga.population);
    summary.overlap = reference.as_deref().map(|r| compare_fronts(&front, r));
    out.svg("front.svg", front_plot(&front, reference.as_deref()))?;
    out.json("summary.json", &summary)?;
    if front.is_empty() {
        return Err(CliError::Infeasible {
            message: "no feasible design in the final population".into(),
            diagnostics: serde_json::to_value(&summary).expect("summary serializes"),
        });
    }
    Ok(summary)
}

fn hypervolume_plot(result: &EvolutionResult) -> Svg {
    let curve: Vec<(f64, f64)> = result
        .trace
        .iter()
        .filter_map(|s| s.normalized_hypervolume.map(|h| (s.generation as f64, h)))
        .collect();
    let mut bounds = curve.clone();
    bounds.push((1.0, 0.0));
    bounds.push((1.0, 1.0));
    let frame = Frame::fit(&bounds, 70.0, 30.0, 560.0, 320.0, false);
    let mut svg = Svg::new(660.0, 400.0);
    frame.axes(&mut svg, "generation", "HV / HV_final");
    if let (Some(first), Some(last)) = (curve.first(), curve.last()) {
        svg.polyline(&[frame.map((first.0, 0.99)), frame.map((last.0, 0.99))], "#bbb", 1.0, true);
    }
    svg.polyline(&frame.map_all(&curve), "#1f77b4", 2.0, false);
    svg.text((70.0, 20.0), 12.0, "start", "normalized hypervolume per generation (dashed: 0.99)");
    svg
}

fn front_plot(front: &[[f64; 2]], reference: Option<&[[f64; 2]]>) -> Svg {
    // Plot ε against μ in degrees.
    let to_xy = |p: &[f64; 2]| (p[0], (-p[1]).to_degrees());
    let ours: Vec<(f64, f64)> = front.iter().map(to_xy).collect();
    let theirs: Vec<(f64, f64)> = reference.unwrap_or_default().iter().map(to_xy).collect();
    let all: Vec<(f64, f64)> = ours.iter().chain(&theirs).copied().collect();
    let frame = Frame::fit(&all, 70.0, 30.0, 560.0, 400.0, false);
    let mut svg = Svg::new(660.0, 480.0);
    frame.axes(&mut svg, "epsilon", "mu (deg)");
    for &p in &theirs {
        svg.circle(frame.map(p), 3.0, "#ff7f0e");
    }
    for &p in &ours {
        svg.circle(frame.map(p), 3.0, "#1f77b4");
    }
    let legend = if theirs.is_empty() { "final front" } else { "final front (blue), sampling-table front (orange)" };
    svg.text((70.0, 20.0), 12.0, "start", legend);
    svg
}

pub fn main(config_path: Option<&Path>, out_dir: &Path, seed: Option<u64>) -> Result<ParetoSummary, CliError> {
    let mut config: ParetoConfig = load(config_path)?;
    if let Some(seed) = seed {
        config.ga.seed = seed;
    }
    let table = config.sampling_table.as_deref().map(|t| resolve(config_path, t));
    let out = Output::create(out_dir, "pareto", config_hash(&config))?;
    run(&config, table.as_deref(), &out)
}
