use std::f64::consts::FRAC_PI_2;
use std::io;

use nalgebra::Matrix2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::ekf::{correct, predict, update_map, FilterConfig, MapLandmark, SlamState};
use crate::grid::LogOdds;
use crate::motion::{unicycle, MotionInput, Pose2};
use crate::sensor::{observe, SensorConfig};
use crate::world::World;
use crate::SlamError;

/// A command held for `steps` consecutive steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSegment {
    pub v: f64,
    pub omega: f64,
    pub dt: f64,
    pub steps: usize,
}

/// Counter-clockwise square loop of side `side`, driven at `speed` with
/// in-place quarter turns at the corners.
pub fn square_loop(side: f64, speed: f64, dt: f64) -> Vec<ControlSegment> {
    let straight = ControlSegment { v: speed, omega: 0.0, dt, steps: (side / (speed * dt)).round() as usize };
    let turn = ControlSegment { v: 0.0, omega: FRAC_PI_2, dt, steps: (1.0 / dt).round() as usize };
    [straight, turn].repeat(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OdometryNoise {
    pub sigma_v: f64,
    pub sigma_omega: f64,
}

impl Default for OdometryNoise {
    fn default() -> Self {
        Self { sigma_v: 0.05, sigma_omega: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    /// True starting pose.
    pub start: Pose2,
    /// Offset of the initial estimate from `start`.
    pub initial_error: [f64; 3],
    /// Prior standard deviations of the initial pose estimate.
    pub initial_sigma: [f64; 3],
    /// Seed the map with the world landmarks instead of discovering them.
    pub prior_map: bool,
    pub prior_map_sigma: f64,
    /// Noise actually applied to the odometry readings.
    pub odometry: OdometryNoise,
    pub sensor: SensorConfig,
    /// Noise the filter assumes.
    pub filter: FilterConfig,
    pub log_odds: LogOdds,
    pub controls: Vec<ControlSegment>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            start: Pose2::new(-3.0, -3.0, 0.0),
            initial_error: [0.0; 3],
            initial_sigma: [1e-3; 3],
            prior_map: false,
            prior_map_sigma: 0.0,
            odometry: OdometryNoise::default(),
            sensor: SensorConfig::default(),
            filter: FilterConfig::default(),
            log_odds: LogOdds::default(),
            controls: square_loop(6.0, 0.5, 0.1),
        }
    }
}

impl SimConfig {
    /// Every noise source switched off, on both the world and the filter side.
    pub fn noise_free() -> Self {
        let mut c = Self::default();
        c.odometry = OdometryNoise { sigma_v: 0.0, sigma_omega: 0.0 };
        c.sensor.range_sigma = 0.0;
        c.sensor.bearing_sigma = 0.0;
        c.filter.sigma_v = 0.0;
        c.filter.sigma_omega = 0.0;
        c.filter.range_sigma = 0.0;
        c.filter.bearing_sigma = 0.0;
        c
    }

    pub fn validate(&self) -> Result<(), SlamError> {
        self.sensor.validate()?;
        self.filter.validate()?;
        let bad = |m: &str| Err(SlamError::InvalidConfig(m.to_string()));
        let numbers = self.initial_error.iter().chain(&self.initial_sigma).chain([
            &self.start.x,
            &self.start.y,
            &self.start.heading,
            &self.prior_map_sigma,
        ]);
        if numbers.clone().any(|v| !v.is_finite()) {
            return bad("start, initial error and sigmas must be finite");
        }
        if self.initial_sigma.iter().any(|s| *s < 0.0) || self.prior_map_sigma < 0.0 {
            return bad("standard deviations must be non-negative");
        }
        let odo = self.odometry;
        if !(odo.sigma_v.is_finite() && odo.sigma_omega.is_finite() && odo.sigma_v >= 0.0 && odo.sigma_omega >= 0.0) {
            return bad("odometry noise must be finite and non-negative");
        }
        if self.controls.iter().any(|c| !MotionInput::new(c.v, c.omega, c.dt).is_valid()) {
            return bad("every control needs finite velocities and dt > 0");
        }
        Ok(())
    }

    pub fn total_steps(&self) -> usize {
        self.controls.iter().map(|c| c.steps).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub truth: Pose2,
    pub dead_reckoning: Pose2,
    pub slam: Pose2,
    pub covariance_trace: f64,
    pub min_eigenvalue: f64,
    pub landmarks: usize,
    pub measurements: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    /// Step 0 is the initial state.
    pub steps: Vec<StepRecord>,
    /// Non-fatal problems met during the run.
    pub events: Vec<String>,
    pub final_state: SlamState,
}

fn position_rmse(steps: &[StepRecord], estimate: impl Fn(&StepRecord) -> Pose2) -> f64 {
    let sum: f64 = steps.iter().map(|s| estimate(s).distance(&s.truth).powi(2)).sum();
    (sum / steps.len() as f64).sqrt()
}

impl RunLog {
    /// Root-mean-square position error of the SLAM estimate over the run.
    pub fn slam_rmse(&self) -> f64 {
        position_rmse(&self.steps, |s| s.slam)
    }

    pub fn dead_reckoning_rmse(&self) -> f64 {
        position_rmse(&self.steps, |s| s.dead_reckoning)
    }

    /// Largest of the final position error and the final heading error.
    pub fn final_slam_error(&self) -> f64 {
        let last = self.steps.last().expect("log has the initial step");
        let heading = crate::motion::wrap_angle(last.slam.heading - last.truth.heading).abs();
        last.slam.distance(&last.truth).max(heading)
    }

    pub fn final_dead_reckoning_error(&self) -> f64 {
        let last = self.steps.last().expect("log has the initial step");
        last.dead_reckoning.distance(&last.truth)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.steps.iter().map(|s| s.min_eigenvalue).fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "step",
            "truth_x",
            "truth_y",
            "truth_heading",
            "dr_x",
            "dr_y",
            "dr_heading",
            "slam_x",
            "slam_y",
            "slam_heading",
            "cov_trace",
        ])?;
        for s in &self.steps {
            let mut row = vec![s.step.to_string()];
            for p in [s.truth, s.dead_reckoning, s.slam] {
                row.extend([p.x, p.y, p.heading].map(|v| v.to_string()));
            }
            row.push(s.covariance_trace.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn record(step: usize, truth: Pose2, dead_reckoning: Pose2, state: &SlamState, measurements: usize) -> StepRecord {
    StepRecord {
        step,
        truth,
        dead_reckoning,
        slam: state.pose,
        covariance_trace: state.trace(),
        min_eigenvalue: state.min_eigenvalue(),
        landmarks: state.landmarks.len(),
        measurements,
    }
}

/// Runs predict, observe, correct and map update for every control step.
///
/// Truth follows the commanded controls. Dead reckoning and the filter both
/// integrate the same noisy odometry. Random draws come from one ChaCha8
/// stream in a fixed order: odometry noise, then the observation.
pub fn simulate(world: &World, config: &SimConfig, seed: u64) -> Result<RunLog, SlamError> {
    world.validate()?;
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v_noise = Normal::new(0.0, config.odometry.sigma_v).expect("validated sigma");
    let w_noise = Normal::new(0.0, config.odometry.sigma_omega).expect("validated sigma");

    let mut truth = config.start;
    let e = config.initial_error;
    let estimate = Pose2::new(truth.x + e[0], truth.y + e[1], truth.heading + e[2]);
    let mut dead_reckoning = estimate;
    let mut state =
        SlamState::new(estimate, config.initial_sigma.map(|s| s * s), world.grid, config.log_odds);
    if config.prior_map {
        let var = config.prior_map_sigma.powi(2);
        for l in &world.landmarks {
            state.insert_landmark(MapLandmark { id: l.id, x: l.x, y: l.y }, Matrix2::identity() * var);
        }
    }

    let mut steps = vec![record(0, truth, dead_reckoning, &state, 0)];
    let mut events = Vec::new();
    let mut k = 0;
    for segment in &config.controls {
        for _ in 0..segment.steps {
            k += 1;
            let commanded = MotionInput::new(segment.v, segment.omega, segment.dt);
            let odometry = MotionInput::new(
                segment.v + v_noise.sample(&mut rng),
                segment.omega + w_noise.sample(&mut rng),
                segment.dt,
            );
            truth = unicycle(&truth, &commanded);
            dead_reckoning = unicycle(&dead_reckoning, &odometry);

            state = predict(&state, &odometry, &config.filter);
            let z = observe(&truth, world, &config.sensor, &mut rng);
            let (corrected, result) = correct(&state, &z, &config.filter);
            if result.skipped {
                events.push(format!("step {k}: singular innovation covariance, update skipped"));
            }
            let (mapped, _) = update_map(&corrected, &z, &config.filter);
            state = mapped;
            steps.push(record(k, truth, dead_reckoning, &state, z.measurements.len()));
        }
    }
    Ok(RunLog { steps, events, final_state: state })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_returns_to_start() {
        let mut truth = Pose2::new(-3.0, -3.0, 0.0);
        for c in square_loop(6.0, 0.5, 0.1) {
            for _ in 0..c.steps {
                truth = unicycle(&truth, &MotionInput::new(c.v, c.omega, c.dt));
            }
        }
        assert!(truth.distance(&Pose2::new(-3.0, -3.0, 0.0)) < 1e-9);
        assert!(crate::motion::wrap_angle(truth.heading).abs() < 1e-9);
    }

    #[test]
    fn same_seed_same_log() {
        let config = SimConfig { controls: square_loop(6.0, 0.5, 0.1)[..2].to_vec(), ..Default::default() };
        let a = simulate(&World::demo(), &config, 5).unwrap();
        let b = simulate(&World::demo(), &config, 5).unwrap();
        assert_eq!(a, b);
        let c = simulate(&World::demo(), &config, 6).unwrap();
        assert_ne!(a.steps, c.steps);
    }

    #[test]
    fn bad_controls_rejected() {
        let config = SimConfig {
            controls: vec![ControlSegment { v: 1.0, omega: 0.0, dt: 0.0, steps: 1 }],
            ..Default::default()
        };
        assert!(matches!(simulate(&World::demo(), &config, 0), Err(SlamError::InvalidConfig(_))));
    }

    #[test]
    fn csv_has_one_row_per_step() {
        let config = SimConfig { controls: vec![ControlSegment { v: 0.5, omega: 0.0, dt: 0.1, steps: 5 }], ..Default::default() };
        let log = simulate(&World::demo(), &config, 1).unwrap();
        let mut buf = Vec::new();
        log.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 7);
    }
}
