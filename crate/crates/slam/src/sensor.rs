use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::motion::{wrap_angle, Pose2};
use crate::world::World;
use crate::SlamError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SensorConfig {
    pub max_range: f64,
    /// Total angular width of the sensor, centred on the heading.
    pub field_of_view: f64,
    /// Number of lidar rays spread evenly over the field of view.
    pub rays: usize,
    pub range_sigma: f64,
    pub bearing_sigma: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self { max_range: 6.0, field_of_view: TAU, rays: 72, range_sigma: 0.05, bearing_sigma: 0.01 }
    }
}

impl SensorConfig {
    pub fn validate(&self) -> Result<(), SlamError> {
        let ok = self.max_range > 0.0
            && self.field_of_view > 0.0
            && self.field_of_view <= TAU
            && self.range_sigma >= 0.0
            && self.bearing_sigma >= 0.0
            && [self.max_range, self.field_of_view, self.range_sigma, self.bearing_sigma]
                .iter()
                .all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(SlamError::InvalidConfig(format!("bad sensor settings {self:?}")))
        }
    }

    /// Bearing of ray `k` relative to the heading.
    pub fn ray_bearing(&self, k: usize) -> f64 {
        if self.field_of_view >= TAU {
            k as f64 * TAU / self.rays as f64
        } else if self.rays == 1 {
            0.0
        } else {
            -self.field_of_view / 2.0 + self.field_of_view * k as f64 / (self.rays - 1) as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Measurement {
    pub id: u32,
    pub range: f64,
    pub bearing: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ray {
    /// Relative to the heading.
    pub bearing: f64,
    pub range: f64,
    /// False when the ray reached `max_range` without hitting anything.
    pub hit: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Observation {
    pub measurements: Vec<Measurement>,
    pub rays: Vec<Ray>,
}

impl Observation {
    pub fn is_empty(&self) -> bool {
        self.measurements.is_empty() && self.rays.is_empty()
    }
}

/// Noise-free range and bearing from `pose` to a point.
pub fn range_bearing(pose: &Pose2, x: f64, y: f64) -> (f64, f64) {
    let (dx, dy) = (x - pose.x, y - pose.y);
    (dx.hypot(dy), wrap_angle(dy.atan2(dx) - pose.heading))
}

/// Simulated sensor reading from the true pose. Landmarks out of range, out
/// of the field of view or behind an obstacle are not reported.
pub fn observe<R: Rng>(pose: &Pose2, world: &World, config: &SensorConfig, rng: &mut R) -> Observation {
    let range_noise = Normal::new(0.0, config.range_sigma).expect("validated sigma");
    let bearing_noise = Normal::new(0.0, config.bearing_sigma).expect("validated sigma");
    let mut measurements = Vec::new();
    for lm in &world.landmarks {
        let (range, bearing) = range_bearing(pose, lm.x, lm.y);
        if range > config.max_range || bearing.abs() > config.field_of_view / 2.0 {
            continue;
        }
        let blocked = world
            .raycast(pose.position(), pose.heading + bearing, config.max_range)
            .is_some_and(|d| d < range - 1e-9);
        if blocked {
            continue;
        }
        measurements.push(Measurement {
            id: lm.id,
            range: (range + range_noise.sample(rng)).max(0.0),
            bearing: wrap_angle(bearing + bearing_noise.sample(rng)),
        });
    }
    let rays = (0..config.rays)
        .map(|k| {
            let bearing = wrap_angle(config.ray_bearing(k));
            match world.raycast(pose.position(), pose.heading + bearing, config.max_range) {
                Some(d) => Ray {
                    bearing,
                    range: (d + range_noise.sample(rng)).clamp(0.0, config.max_range),
                    hit: true,
                },
                None => Ray { bearing, range: config.max_range, hit: false },
            }
        })
        .collect();
    Observation { measurements, rays }
}
