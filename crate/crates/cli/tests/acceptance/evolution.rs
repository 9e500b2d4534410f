use legkit_cli::commands::pareto::{summarize, ParetoConfig};
use legkit_core::dominance::dominates;
use legkit_core::nsga2::{evolve, fast_nondominated_sort, hypervolume_2d, GaConfig, Individual, LegProblem};
use legkit_core::sobol::lp_tau;
use legkit_slam::{plan_on, DiagonalCost, PlanError};
use rand::Rng;

use crate::{ensure, rng, Verdict};

/// Generations run; the last one fixes the hypervolume normalization.
const GENERATIONS: usize = 2500;
const DEADLINE: usize = 2000;

pub fn convergence() -> Verdict {
    let defaults = ParetoConfig::default();
    let problem = LegProblem::new(&defaults.bounds, defaults.sweep, defaults.branch, defaults.metric);
    let config = GaConfig { population: 100, generations: GENERATIONS, ..defaults.ga };
    let result = evolve(&problem, &config).map_err(|e| e.to_string())?;
    let summary = summarize(&result, config.population);
    ensure(summary.monotone, || "normalized hypervolume decreased between generations".into())?;
    let reached = summary.generation_at_99.ok_or("normalized hypervolume never reached 0.99")?;
    ensure(reached <= DEADLINE, || format!("0.99 first reached at generation {reached}"))?;
    let at_deadline = result
        .trace
        .iter()
        .find(|s| s.generation == DEADLINE)
        .and_then(|s| s.normalized_hypervolume)
        .unwrap_or(f64::NAN);
    Ok(format!(
        "pop 100 over {GENERATIONS} generations: monotone, 0.99 reached at generation {reached}, \
         {at_deadline:.5} at generation {DEADLINE}, front of {}",
        summary.front_size
    ))
}

/// Fronts by repeatedly removing the members nobody else dominates.
fn peel_fronts(objs: &[Vec<f64>]) -> Vec<Vec<usize>> {
    let mut left: Vec<usize> = (0..objs.len()).collect();
    let mut fronts = Vec::new();
    while !left.is_empty() {
        let front: Vec<usize> =
            left.iter().copied().filter(|&i| !left.iter().any(|&j| dominates(&objs[j], &objs[i]))).collect();
        left.retain(|i| !front.contains(i));
        fronts.push(front);
    }
    fronts
}

fn sorting() -> Result<(), String> {
    let mut rng = rng(801);
    for trial in 0..1000 {
        let n = rng.random_range(1..=200);
        let m = rng.random_range(2..=3);
        let objs: Vec<Vec<f64>> = (0..n).map(|_| (0..m).map(|_| rng.random_range(0..12) as f64).collect()).collect();
        let pop: Vec<Individual> = objs.iter().map(|o| Individual::evaluated(vec![], o.clone(), 0.0)).collect();
        ensure(fast_nondominated_sort(&pop) == peel_fronts(&objs), || format!("sorting differs on population {trial}"))?;
    }
    Ok(())
}

fn hypervolume() -> Result<(), String> {
    let two = hypervolume_2d(&[[0.0, 0.5], [0.5, 0.0]], [1.0, 1.0]).area;
    ensure(two == 0.75, || format!("two boxes: {two}"))?;
    let stair = hypervolume_2d(&[[0.25, 0.5], [0.0, 0.75], [0.5, 0.25]], [1.0, 1.0]).area;
    ensure(stair == 0.5625, || format!("staircase: {stair}"))
}

type Cell = (usize, usize);

/// Dijkstra with a linear scan for the next node and the planner's move rules.
fn dijkstra(width: usize, height: usize, blocked: &[bool], start: Cell, goal: Cell, cost: DiagonalCost) -> Option<f64> {
    let idx = |c: Cell| c.1 * width + c.0;
    let mut dist = vec![f64::INFINITY; width * height];
    let mut done = vec![false; width * height];
    dist[idx(start)] = 0.0;
    loop {
        let k = (0..dist.len())
            .filter(|&k| !done[k] && dist[k].is_finite())
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))?;
        if k == idx(goal) {
            return Some(dist[k]);
        }
        done[k] = true;
        let (x, y) = ((k % width) as i64, (k / width) as i64);
        for (dx, dy) in (-1..=1i64).flat_map(|dx| (-1..=1i64).map(move |dy| (dx, dy))) {
            let (nx, ny) = (x + dx, y + dy);
            if (dx, dy) == (0, 0) || nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                continue;
            }
            let n = (nx as usize, ny as usize);
            let diagonal = dx != 0 && dy != 0;
            if blocked[idx(n)]
                || (diagonal && (blocked[idx((nx as usize, y as usize))] || blocked[idx((x as usize, ny as usize))]))
            {
                continue;
            }
            let step = if diagonal && cost == DiagonalCost::Euclidean { 2f64.sqrt() } else { 1.0 };
            dist[idx(n)] = dist[idx(n)].min(dist[k] + step);
        }
    }
}

fn planning() -> Result<usize, String> {
    let mut rng = rng(803);
    let mut reachable = 0;
    for trial in 0..50 {
        let (width, height) = (rng.random_range(5..30), rng.random_range(5..30));
        let density = rng.random_range(0.0..0.4);
        let mut blocked: Vec<bool> = (0..width * height).map(|_| rng.random_bool(density)).collect();
        let start = (rng.random_range(0..width), rng.random_range(0..height));
        let goal = (rng.random_range(0..width), rng.random_range(0..height));
        blocked[start.1 * width + start.0] = false;
        blocked[goal.1 * width + goal.0] = false;
        let cost = if trial % 2 == 0 { DiagonalCost::Unit } else { DiagonalCost::Euclidean };
        let oracle = dijkstra(width, height, &blocked, start, goal, cost);
        match (plan_on(width, height, |c| blocked[c.1 * width + c.0], start, goal, cost), oracle) {
            (Ok(path), Some(d)) => {
                ensure((path.cost - d).abs() < 1e-9, || format!("grid {trial}: A* {} vs Dijkstra {d}", path.cost))?;
                reachable += 1;
            }
            (Err(PlanError::NoPath { .. }), None) => {}
            (got, want) => return Err(format!("grid {trial}: A* {got:?} vs Dijkstra {want:?}")),
        }
    }
    Ok(reachable)
}

fn radical_inverse(mut n: u32) -> f64 {
    let (mut x, mut f) = (0.0, 0.5);
    while n > 0 {
        x += f * (n & 1) as f64;
        n >>= 1;
        f *= 0.5;
    }
    x
}

fn low_discrepancy() -> Result<(), String> {
    let pts = lp_tau(1, 256, 0).map_err(|e| e.to_string())?;
    for (n, p) in pts.iter().enumerate() {
        ensure(p[0] == radical_inverse(n as u32), || format!("point {n}: {} vs {}", p[0], radical_inverse(n as u32)))?;
    }
    Ok(())
}

pub fn oracles() -> Verdict {
    sorting()?;
    hypervolume()?;
    let reachable = planning()?;
    low_discrepancy()?;
    Ok(format!(
        "sorting on 1000 populations, hypervolume 0.75 and 0.5625, A* on 50 grids ({reachable} reachable), \
         256 LP-tau points all agree"
    ))
}
