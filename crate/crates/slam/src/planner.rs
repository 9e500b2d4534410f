//! 8-connected A* over an occupancy grid.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Cell, OccupancyGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagonalCost {
    /// Every move costs 1; path cost is the Chebyshev length.
    #[default]
    Unit,
    /// Diagonal moves cost √2.
    Euclidean,
}

impl DiagonalCost {
    pub fn step(self, diagonal: bool) -> f64 {
        match (self, diagonal) {
            (_, false) | (DiagonalCost::Unit, true) => 1.0,
            (DiagonalCost::Euclidean, true) => std::f64::consts::SQRT_2,
        }
    }

    /// Admissible and consistent lower bound on the cost between two cells.
    pub fn heuristic(self, a: Cell, b: Cell) -> f64 {
        let dx = a.0.abs_diff(b.0) as f64;
        let dy = a.1.abs_diff(b.1) as f64;
        match self {
            DiagonalCost::Unit => dx.max(dy),
            DiagonalCost::Euclidean => dx.max(dy) + (std::f64::consts::SQRT_2 - 1.0) * dx.min(dy),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PlannerConfig {
    /// Cells with occupancy probability at or above this are blocked.
    pub occupied_threshold: f64,
    pub diagonal: DiagonalCost,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self { occupied_threshold: 0.65, diagonal: DiagonalCost::Unit }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("cell {0:?} is outside the grid")]
    OutOfBounds(Cell),
    #[error("cell {0:?} is occupied")]
    Blocked(Cell),
    #[error("no path between {start:?} and {goal:?}")]
    NoPath { start: Cell, goal: Cell },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlannedPath {
    pub cells: Vec<Cell>,
    pub cost: f64,
}

#[derive(PartialEq)]
struct Open {
    f: f64,
    g: f64,
    index: usize,
}

impl Eq for Open {}

impl Ord for Open {
    // Min-heap on f, then prefer deeper nodes, then the lower index.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A* on a `width × height` grid where `blocked` marks impassable cells.
/// Diagonal moves may not cut a blocked corner.
pub fn plan_on<F>(
    width: usize,
    height: usize,
    blocked: F,
    start: Cell,
    goal: Cell,
    diagonal: DiagonalCost,
) -> Result<PlannedPath, PlanError>
where
    F: Fn(Cell) -> bool,
{
    for cell in [start, goal] {
        if cell.0 >= width || cell.1 >= height {
            return Err(PlanError::OutOfBounds(cell));
        }
        if blocked(cell) {
            return Err(PlanError::Blocked(cell));
        }
    }
    let index = |c: Cell| c.1 * width + c.0;
    let mut g = vec![f64::INFINITY; width * height];
    let mut parent = vec![usize::MAX; width * height];
    let mut closed = vec![false; width * height];
    let mut open = BinaryHeap::new();
    g[index(start)] = 0.0;
    open.push(Open { f: diagonal.heuristic(start, goal), g: 0.0, index: index(start) });

    while let Some(Open { g: cost, index: current, .. }) = open.pop() {
        if closed[current] {
            continue;
        }
        closed[current] = true;
        let cell = (current % width, current / width);
        if cell == goal {
            let mut cells = vec![cell];
            let mut k = current;
            while parent[k] != usize::MAX {
                k = parent[k];
                cells.push((k % width, k / width));
            }
            cells.reverse();
            return Ok(PlannedPath { cells, cost });
        }
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let (nx, ny) = (cell.0 as i64 + dx, cell.1 as i64 + dy);
                if nx < 0 || ny < 0 || nx as usize >= width || ny as usize >= height {
                    continue;
                }
                let next = (nx as usize, ny as usize);
                if blocked(next) {
                    continue;
                }
                let is_diagonal = dx != 0 && dy != 0;
                if is_diagonal && (blocked((next.0, cell.1)) || blocked((cell.0, next.1))) {
                    continue;
                }
                let k = index(next);
                let tentative = cost + diagonal.step(is_diagonal);
                if !closed[k] && tentative < g[k] {
                    g[k] = tentative;
                    parent[k] = current;
                    open.push(Open { f: tentative + diagonal.heuristic(next, goal), g: tentative, index: k });
                }
            }
        }
    }
    Err(PlanError::NoPath { start, goal })
}

/// Plans on an occupancy grid, treating cells at or above the threshold as blocked.
pub fn plan_path(grid: &OccupancyGrid, start: Cell, goal: Cell, config: &PlannerConfig) -> Result<PlannedPath, PlanError> {
    plan_on(
        grid.width(),
        grid.height(),
        |c| grid.probability(c) >= config.occupied_threshold,
        start,
        goal,
        config.diagonal,
    )
}

/// Writes the path as `col,row` rows.
pub fn write_path<W: std::io::Write>(writer: W, path: &PlannedPath) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["col", "row"])?;
    for (c, r) in &path.cells {
        w.write_record([c.to_string(), r.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
