//! Planar EKF-SLAM simulation: unicycle motion, range-bearing landmarks,
//! a log-odds occupancy grid fed by simulated lidar, and A* planning on it.

use thiserror::Error;

pub mod ekf;
pub mod grid;
pub mod motion;
pub mod planner;
pub mod sensor;
pub mod sim;
pub mod world;

pub use ekf::{correct, fuse, predict, update_map, CorrectionResult, FilterConfig, MapDelta, MapLandmark, SlamState};
pub use grid::{LogOdds, OccupancyGrid};
pub use motion::{wrap_angle, MotionInput, Pose2};
pub use planner::{plan_on, plan_path, DiagonalCost, PlanError, PlannedPath, PlannerConfig};
pub use sensor::{observe, Measurement, Observation, Ray, SensorConfig};
pub use sim::{simulate, square_loop, ControlSegment, OdometryNoise, RunLog, SimConfig, StepRecord};
pub use world::{GridSpec, Landmark, World};

#[derive(Debug, Error)]
pub enum SlamError {
    #[error("invalid world: {0}")]
    InvalidWorld(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
