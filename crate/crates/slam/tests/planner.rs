use legkit_slam::{plan_on, plan_path, DiagonalCost, GridSpec, LogOdds, OccupancyGrid, PlanError, PlannerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Cell = (usize, usize);

/// Plain Dijkstra with a linear scan for the next node, same move rules as the planner.
fn dijkstra(width: usize, height: usize, blocked: &[bool], start: Cell, goal: Cell, cost: DiagonalCost) -> Option<f64> {
    let idx = |c: Cell| c.1 * width + c.0;
    let mut dist = vec![f64::INFINITY; width * height];
    let mut done = vec![false; width * height];
    dist[idx(start)] = 0.0;
    loop {
        let mut best = None;
        for k in 0..dist.len() {
            if !done[k] && dist[k].is_finite() && best.is_none_or(|b: usize| dist[k] < dist[b]) {
                best = Some(k);
            }
        }
        let k = best?;
        if k == idx(goal) {
            return Some(dist[k]);
        }
        done[k] = true;
        let (x, y) = ((k % width) as i64, (k / width) as i64);
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                let (nx, ny) = (x + dx, y + dy);
                if (dx, dy) == (0, 0) || nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                    continue;
                }
                let n = (nx as usize, ny as usize);
                if blocked[idx(n)] {
                    continue;
                }
                let diagonal = dx != 0 && dy != 0;
                if diagonal && (blocked[idx((nx as usize, y as usize))] || blocked[idx((x as usize, ny as usize))]) {
                    continue;
                }
                let step = if diagonal && cost == DiagonalCost::Euclidean { 2f64.sqrt() } else { 1.0 };
                let d = dist[k] + step;
                if d < dist[idx(n)] {
                    dist[idx(n)] = d;
                }
            }
        }
    }
}

fn check_path(width: usize, blocked: &[bool], cells: &[Cell], cost: DiagonalCost) -> f64 {
    let mut total = 0.0;
    for w in cells.windows(2) {
        let (a, b) = (w[0], w[1]);
        assert!(!blocked[b.1 * width + b.0]);
        let (dx, dy) = (a.0.abs_diff(b.0), a.1.abs_diff(b.1));
        assert!(dx <= 1 && dy <= 1 && dx + dy > 0);
        if dx == 1 && dy == 1 {
            assert!(!blocked[a.1 * width + b.0] && !blocked[b.1 * width + a.0], "corner cut");
            total += if cost == DiagonalCost::Euclidean { 2f64.sqrt() } else { 1.0 };
        } else {
            total += 1.0;
        }
    }
    total
}

#[test]
fn astar_matches_dijkstra_on_random_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
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
        match plan_on(width, height, |c| blocked[c.1 * width + c.0], start, goal, cost) {
            Ok(path) => {
                reachable += 1;
                let expected = oracle.expect("oracle finds a path too");
                assert!((path.cost - expected).abs() < 1e-9, "trial {trial}: {} vs {expected}", path.cost);
                assert_eq!(path.cells.first(), Some(&start));
                assert_eq!(path.cells.last(), Some(&goal));
                assert!((check_path(width, &blocked, &path.cells, cost) - path.cost).abs() < 1e-9);
            }
            Err(PlanError::NoPath { .. }) => assert!(oracle.is_none(), "trial {trial}"),
            Err(e) => panic!("{e}"),
        }
    }
    assert!(reachable >= 25, "too few solvable grids ({reachable})");
}

#[test]
fn open_grid_corner_to_corner_is_chebyshev() {
    let spec = GridSpec { resolution: 1.0, origin: [0.0, 0.0], width: 10, height: 10 };
    let grid = OccupancyGrid::new(spec, LogOdds::default());
    let path = plan_path(&grid, (0, 0), (9, 9), &PlannerConfig::default()).unwrap();
    let blocked = vec![false; 100];
    assert_eq!(Some(path.cost), dijkstra(10, 10, &blocked, (0, 0), (9, 9), DiagonalCost::Unit));
    assert_eq!(path.cost, 9.0);
}

#[test]
fn occupied_cells_block_the_planner() {
    let spec = GridSpec { resolution: 1.0, origin: [0.0, 0.0], width: 10, height: 10 };
    let mut grid = OccupancyGrid::new(spec, LogOdds::default());
    for row in 0..10 {
        grid.set_probability((5, row), 0.9);
    }
    let err = plan_path(&grid, (0, 0), (9, 9), &PlannerConfig::default()).unwrap_err();
    assert!(matches!(err, PlanError::NoPath { .. }));
    grid.set_probability((5, 4), 0.6);
    let path = plan_path(&grid, (0, 0), (9, 9), &PlannerConfig::default()).unwrap();
    assert!(path.cells.contains(&(5, 4)));
}
