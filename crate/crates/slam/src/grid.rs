//! Log-odds occupancy grid.

use std::fmt::Write as _;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::world::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LogOdds {
    /// Added to cells a ray passes through.
    pub free: f64,
    /// Added to the cell where a ray ends on an obstacle.
    pub occupied: f64,
    /// Cell values are clamped to `[-limit, limit]`.
    pub limit: f64,
}

impl Default for LogOdds {
    fn default() -> Self {
        Self { free: -0.4, occupied: 0.85, limit: 5.0 }
    }
}

pub type Cell = (usize, usize);

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    pub spec: GridSpec,
    pub model: LogOdds,
    cells: Vec<f64>,
}

impl OccupancyGrid {
    pub fn new(spec: GridSpec, model: LogOdds) -> Self {
        Self { spec, model, cells: vec![0.0; spec.width * spec.height] }
    }

    pub fn width(&self) -> usize {
        self.spec.width
    }

    pub fn height(&self) -> usize {
        self.spec.height
    }

    /// Cell containing a world point, if inside the grid.
    pub fn cell_of(&self, p: Vector2<f64>) -> Option<Cell> {
        let col = ((p.x - self.spec.origin[0]) / self.spec.resolution).floor();
        let row = ((p.y - self.spec.origin[1]) / self.spec.resolution).floor();
        let inside = col >= 0.0 && row >= 0.0 && (col as usize) < self.spec.width && (row as usize) < self.spec.height;
        inside.then_some((col as usize, row as usize))
    }

    pub fn center(&self, (col, row): Cell) -> Vector2<f64> {
        let r = self.spec.resolution;
        Vector2::new(self.spec.origin[0] + (col as f64 + 0.5) * r, self.spec.origin[1] + (row as f64 + 0.5) * r)
    }

    pub fn log_odds(&self, (col, row): Cell) -> f64 {
        self.cells[row * self.spec.width + col]
    }

    pub fn probability(&self, cell: Cell) -> f64 {
        1.0 / (1.0 + (-self.log_odds(cell)).exp())
    }

    pub fn add(&mut self, (col, row): Cell, delta: f64) {
        let v = &mut self.cells[row * self.spec.width + col];
        *v = (*v + delta).clamp(-self.model.limit, self.model.limit);
    }

    pub fn set_probability(&mut self, (col, row): Cell, p: f64) {
        let l = (p / (1.0 - p)).ln().clamp(-self.model.limit, self.model.limit);
        self.cells[row * self.spec.width + col] = l;
    }

    /// Marks the cells from `from` up to `to` as free and, when `hit`, the end
    /// cell as occupied. Returns the number of cells touched. Ray parts
    /// outside the grid are ignored.
    pub fn integrate_ray(&mut self, from: Vector2<f64>, to: Vector2<f64>, hit: bool) -> usize {
        let Some(start) = self.cell_of(from) else { return 0 };
        let end = self.unclamped_cell(to);
        let line = bresenham((start.0 as i64, start.1 as i64), end);
        let last = line.len() - 1;
        let mut touched = 0;
        for (i, (c, r)) in line.into_iter().enumerate() {
            if c < 0 || r < 0 || c as usize >= self.spec.width || r as usize >= self.spec.height {
                break;
            }
            let cell = (c as usize, r as usize);
            let delta = if i == last && hit { self.model.occupied } else { self.model.free };
            self.add(cell, delta);
            touched += 1;
        }
        touched
    }

    fn unclamped_cell(&self, p: Vector2<f64>) -> (i64, i64) {
        (
            ((p.x - self.spec.origin[0]) / self.spec.resolution).floor() as i64,
            ((p.y - self.spec.origin[1]) / self.spec.resolution).floor() as i64,
        )
    }

    /// Plain-text PGM (`P2`), top row first, white for free space.
    pub fn to_pgm(&self) -> String {
        let mut out = format!("P2\n{} {}\n255\n", self.spec.width, self.spec.height);
        for row in (0..self.spec.height).rev() {
            let line: Vec<String> = (0..self.spec.width)
                .map(|col| (((1.0 - self.probability((col, row))) * 255.0).round() as u8).to_string())
                .collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

/// Integer line from `a` to `b`, both ends included.
pub fn bresenham(a: (i64, i64), b: (i64, i64)) -> Vec<(i64, i64)> {
    let (mut x, mut y) = a;
    let dx = (b.0 - a.0).abs();
    let dy = -(b.1 - a.1).abs();
    let sx = if a.0 < b.0 { 1 } else { -1 };
    let sy = if a.1 < b.1 { 1 } else { -1 };
    let mut err = dx + dy;
    let mut out = Vec::with_capacity((dx - dy) as usize + 1);
    loop {
        out.push((x, y));
        if (x, y) == b {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
    out
}
