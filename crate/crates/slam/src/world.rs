use std::io;
use std::path::Path;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::SlamError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Landmark {
    pub id: u32,
    pub x: f64,
    pub y: f64,
}

impl Landmark {
    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.x, self.y)
    }
}

/// Occupancy-grid geometry. Cell `(col, row)` covers
/// `[origin + col·res, origin + (col+1)·res)` along x, likewise along y.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub resolution: f64,
    pub origin: [f64; 2],
    pub width: usize,
    pub height: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { resolution: 0.1, origin: [-5.0, -5.0], width: 100, height: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct World {
    pub landmarks: Vec<Landmark>,
    /// Closed polygons, vertices in order.
    #[serde(default)]
    pub obstacles: Vec<Vec<[f64; 2]>>,
    #[serde(default)]
    pub grid: GridSpec,
}

impl World {
    pub fn validate(&self) -> Result<(), SlamError> {
        let bad = |m: String| Err(SlamError::InvalidWorld(m));
        let mut ids: Vec<u32> = self.landmarks.iter().map(|l| l.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return bad("landmark ids must be unique".into());
        }
        if self.landmarks.iter().any(|l| !(l.x.is_finite() && l.y.is_finite())) {
            return bad("landmark coordinates must be finite".into());
        }
        for (i, poly) in self.obstacles.iter().enumerate() {
            if poly.len() < 3 {
                return bad(format!("obstacle {i} needs at least 3 vertices"));
            }
            if poly.iter().flatten().any(|v| !v.is_finite()) {
                return bad(format!("obstacle {i} has non-finite vertices"));
            }
        }
        let g = &self.grid;
        if !(g.resolution.is_finite() && g.resolution > 0.0) || g.width == 0 || g.height == 0 {
            return bad("grid needs a positive resolution and size".into());
        }
        Ok(())
    }

    pub fn from_reader<R: io::Read>(reader: R) -> Result<Self, SlamError> {
        let world: World = serde_json::from_reader(reader)?;
        world.validate()?;
        Ok(world)
    }

    pub fn from_path(path: &Path) -> Result<Self, SlamError> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(io::BufReader::new(file))
    }

    pub fn landmark(&self, id: u32) -> Option<&Landmark> {
        self.landmarks.iter().find(|l| l.id == id)
    }

    /// Distance along a ray to the nearest obstacle edge, if any is hit.
    pub fn raycast(&self, origin: Vector2<f64>, angle: f64, max_range: f64) -> Option<f64> {
        let dir = Vector2::new(angle.cos(), angle.sin());
        let mut best: Option<f64> = None;
        for poly in &self.obstacles {
            for k in 0..poly.len() {
                let a = Vector2::new(poly[k][0], poly[k][1]);
                let b = Vector2::new(poly[(k + 1) % poly.len()][0], poly[(k + 1) % poly.len()][1]);
                if let Some(t) = ray_segment(origin, dir, a, b) {
                    if t <= max_range && best.is_none_or(|d| t < d) {
                        best = Some(t);
                    }
                }
            }
        }
        best
    }

    /// Ten-by-ten room with eight landmarks and one box obstacle.
    pub fn demo() -> Self {
        let landmarks = [
            (-4.0, -4.0),
            (0.0, -4.5),
            (4.0, -4.0),
            (4.5, 0.0),
            (4.0, 4.0),
            (0.0, 4.5),
            (-4.0, 4.0),
            (-4.5, 0.0),
        ]
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Landmark { id: i as u32 + 1, x, y })
        .collect();
        let room = vec![[-5.0, -5.0], [5.0, -5.0], [5.0, 5.0], [-5.0, 5.0]];
        let pillar = vec![[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]];
        World { landmarks, obstacles: vec![room, pillar], grid: GridSpec::default() }
    }
}

fn cross(a: Vector2<f64>, b: Vector2<f64>) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Parameter `t ≥ 0` where `origin + t·dir` meets segment `ab`.
fn ray_segment(origin: Vector2<f64>, dir: Vector2<f64>, a: Vector2<f64>, b: Vector2<f64>) -> Option<f64> {
    let edge = b - a;
    let denom = cross(dir, edge);
    if denom.abs() < 1e-12 {
        return None;
    }
    let rel = a - origin;
    let t = cross(rel, edge) / denom;
    let s = cross(rel, dir) / denom;
    (t >= 0.0 && (0.0..=1.0).contains(&s)).then_some(t)
}
