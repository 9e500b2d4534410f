use std::path::{Path, PathBuf};

use legkit_slam::planner::write_path;
use legkit_slam::{plan_path, simulate, PlannedPath, Pose2, StepRecord, PlannerConfig, RunLog, SimConfig, SlamError, World};
use serde::{Deserialize, Serialize};

use crate::config::{config_hash, load, resolve};
use crate::svg::{Frame, Svg};
use crate::{CliError, Output};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlamRunConfig {
    /// World file; the built-in demo room when omitted. Relative paths are
    /// taken from the config file's directory.
    pub world: Option<PathBuf>,
    pub seed: u64,
    pub sim: SimConfig,
    pub planner: PlannerConfig,
    /// Planning goal in world coordinates; the path starts at the final
    /// SLAM pose.
    pub goal: [f64; 2],
}

impl Default for SlamRunConfig {
    fn default() -> Self {
        Self {
            world: None,
            seed: 0,
            sim: SimConfig::default(),
            planner: PlannerConfig::default(),
            goal: [3.0, 3.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSummary {
    pub cells: usize,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlamSummary {
    pub seed: u64,
    pub steps: usize,
    pub final_error: f64,
    pub final_dead_reckoning_error: f64,
    pub slam_rmse: f64,
    pub dead_reckoning_rmse: f64,
    pub min_eigenvalue: f64,
    pub landmarks: usize,
    pub events: Vec<String>,
    pub path: Option<PathSummary>,
    pub plan_error: Option<String>,
}

fn world_error(e: SlamError) -> CliError {
    CliError::Config(e.to_string())
}

/// Writes `run_log.csv`, `grid.pgm`, `path.csv` (when a path exists),
/// `slam.svg` and `summary.json`.
pub fn run(config: &SlamRunConfig, world: &World, out: &Output) -> Result<SlamSummary, CliError> {
    let log = simulate(world, &config.sim, config.seed).map_err(world_error)?;
    let state = &log.final_state;
    let start = state.grid.cell_of(state.pose.position());
    let goal = state.grid.cell_of(Pose2::new(config.goal[0], config.goal[1], 0.0).position());
    let planned = match (start, goal) {
        (Some(s), Some(g)) => plan_path(&state.grid, s, g, &config.planner).map_err(|e| e.to_string()),
        _ => Err("start or goal lies outside the grid".to_string()),
    };

    out.csv("run_log.csv", |buf| log.write_csv(buf))?;
    out.pgm("grid.pgm", &state.grid.to_pgm())?;
    if let Ok(path) = &planned {
        out.csv("path.csv", |buf| write_path(buf, path))?;
    }
    out.svg("slam.svg", map_plot(&log, world, planned.as_ref().ok()))?;

    let summary = SlamSummary {
        seed: config.seed,
        steps: log.steps.len() - 1,
        final_error: log.final_slam_error(),
        final_dead_reckoning_error: log.final_dead_reckoning_error(),
        slam_rmse: log.slam_rmse(),
        dead_reckoning_rmse: log.dead_reckoning_rmse(),
        min_eigenvalue: log.min_eigenvalue(),
        landmarks: state.landmarks.len(),
        events: log.events.clone(),
        path: planned.as_ref().ok().map(|p| PathSummary { cells: p.cells.len(), cost: p.cost }),
        plan_error: planned.as_ref().err().cloned(),
    };
    out.json("summary.json", &summary)?;
    if let Err(why) = planned {
        return Err(CliError::Infeasible {
            message: format!("path planning failed: {why}"),
            diagnostics: serde_json::to_value(&summary).expect("summary serializes"),
        });
    }
    Ok(summary)
}

fn map_plot(log: &RunLog, world: &World, path: Option<&PlannedPath>) -> Svg {
    let grid = &log.final_state.grid;
    let spec = grid.spec;
    let extent = [
        (spec.origin[0], spec.origin[1]),
        (spec.origin[0] + spec.width as f64 * spec.resolution, spec.origin[1] + spec.height as f64 * spec.resolution),
    ];
    let frame = Frame::fit(&extent, 60.0, 30.0, 500.0, 500.0, true);
    let mut svg = Svg::new(600.0, 580.0);
    let cell_px = spec.resolution / (frame.x.1 - frame.x.0) * frame.width;
    for row in 0..grid.height() {
        for col in 0..grid.width() {
            let p = grid.probability((col, row));
            if (p - 0.5).abs() < 1e-3 {
                continue;
            }
            let shade = ((1.0 - p) * 255.0).round() as u8;
            let c = grid.center((col, row));
            let (x, y) = frame.map((c.x - spec.resolution / 2.0, c.y + spec.resolution / 2.0));
            svg.rect((x, y), cell_px, cell_px, &format!("rgb({shade},{shade},{shade})"));
        }
    }
    frame.axes(&mut svg, "x (m)", "y (m)");
    for poly in &world.obstacles {
        let mut pts: Vec<(f64, f64)> = poly.iter().map(|v| (v[0], v[1])).collect();
        pts.push(pts[0]);
        svg.polyline(&frame.map_all(&pts), "#8c564b", 1.0, true);
    }
    let track = |f: fn(&StepRecord) -> Pose2| -> Vec<(f64, f64)> {
        log.steps.iter().map(f).map(|p| (p.x, p.y)).collect()
    };
    svg.polyline(&frame.map_all(&track(|s| s.truth)), "#2ca02c", 2.0, false);
    svg.polyline(&frame.map_all(&track(|s| s.dead_reckoning)), "#ff7f0e", 1.5, true);
    svg.polyline(&frame.map_all(&track(|s| s.slam)), "#1f77b4", 1.5, false);
    for l in &log.final_state.landmarks {
        svg.circle(frame.map((l.x, l.y)), 4.0, "#d62728");
    }
    if let Some(path) = path {
        let pts: Vec<(f64, f64)> = path.cells.iter().map(|&c| grid.center(c)).map(|c| (c.x, c.y)).collect();
        svg.polyline(&frame.map_all(&pts), "#9467bd", 2.5, false);
    }
    svg.text(
        (60.0, 20.0),
        12.0,
        "start",
        "truth (green), dead reckoning (orange), SLAM (blue), landmarks (red), path (purple)",
    );
    svg
}

pub fn main(config_path: Option<&Path>, out_dir: &Path, seed: Option<u64>) -> Result<SlamSummary, CliError> {
    let mut config: SlamRunConfig = load(config_path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    let world = match &config.world {
        Some(p) => World::from_path(&resolve(config_path, p)).map_err(world_error)?,
        None => World::demo(),
    };
    let out = Output::create(out_dir, "slam", config_hash(&config))?;
    run(&config, &world, &out)
}
