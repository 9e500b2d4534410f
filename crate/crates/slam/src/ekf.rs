//! Landmark EKF over pose and map, with an occupancy grid kept alongside.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix2x3, Vector2};
use serde::{Deserialize, Serialize};

use crate::grid::{LogOdds, OccupancyGrid};
use crate::motion::{control_jacobian, state_jacobian, unicycle, wrap_angle, MotionInput, Pose2};
use crate::sensor::{range_bearing, Observation};
use crate::world::GridSpec;
use crate::SlamError;

/// Noise model assumed by the filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterConfig {
    /// Odometry noise, standard deviation on linear velocity.
    pub sigma_v: f64,
    /// Odometry noise, standard deviation on angular velocity.
    pub sigma_omega: f64,
    pub range_sigma: f64,
    pub bearing_sigma: f64,
    /// Added to the pose block of the process noise every step.
    pub process_floor: f64,
    /// Lower bound on measurement variances.
    pub measurement_floor: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            sigma_v: 0.05,
            sigma_omega: 0.05,
            range_sigma: 0.05,
            bearing_sigma: 0.01,
            process_floor: 1e-12,
            measurement_floor: 1e-10,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), SlamError> {
        let values = [
            self.sigma_v,
            self.sigma_omega,
            self.range_sigma,
            self.bearing_sigma,
            self.process_floor,
            self.measurement_floor,
        ];
        if values.iter().all(|v| v.is_finite() && *v >= 0.0) {
            Ok(())
        } else {
            Err(SlamError::InvalidConfig(format!("bad filter settings {self:?}")))
        }
    }

    fn measurement_noise(&self) -> Matrix2<f64> {
        Matrix2::new(
            (self.range_sigma * self.range_sigma).max(self.measurement_floor),
            0.0,
            0.0,
            (self.bearing_sigma * self.bearing_sigma).max(self.measurement_floor),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapLandmark {
    pub id: u32,
    pub x: f64,
    pub y: f64,
}

/// Landmarks occupy state entries `3 + 2k` and `4 + 2k` in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct SlamState {
    pub pose: Pose2,
    pub covariance: DMatrix<f64>,
    pub landmarks: Vec<MapLandmark>,
    pub grid: OccupancyGrid,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MapDelta {
    /// Landmarks initialized from this observation.
    pub added: Vec<MapLandmark>,
    /// Landmarks shifted by a correction, with their displacement.
    pub moved: Vec<(u32, [f64; 2])>,
    /// Grid cells touched by rays.
    pub cells_updated: usize,
}

impl MapDelta {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.moved.is_empty() && self.cells_updated == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionResult {
    pub pose: Pose2,
    /// Empty when no known landmark was measured or the update was skipped.
    pub gain: DMatrix<f64>,
    /// Stacked `(range, bearing)` residuals, bearings wrapped.
    pub innovation: DVector<f64>,
    pub map_delta: MapDelta,
    /// Set when the innovation covariance could not be factored.
    pub skipped: bool,
}

impl SlamState {
    pub fn new(pose: Pose2, pose_covariance: [f64; 3], grid: GridSpec, model: LogOdds) -> Self {
        Self {
            pose,
            covariance: DMatrix::from_diagonal(&DVector::from_column_slice(&pose_covariance)),
            landmarks: Vec::new(),
            grid: OccupancyGrid::new(grid, model),
        }
    }

    pub fn dimension(&self) -> usize {
        3 + 2 * self.landmarks.len()
    }

    pub fn landmark_index(&self, id: u32) -> Option<usize> {
        self.landmarks.iter().position(|l| l.id == id)
    }

    pub fn landmark(&self, id: u32) -> Option<&MapLandmark> {
        self.landmarks.iter().find(|l| l.id == id)
    }

    /// Inserts a landmark with the given covariance and no correlation to the
    /// rest of the state.
    pub fn insert_landmark(&mut self, landmark: MapLandmark, covariance: Matrix2<f64>) {
        let n = self.dimension();
        let mut p = self.covariance.clone().resize(n + 2, n + 2, 0.0);
        p.view_mut((n, n), (2, 2)).copy_from(&covariance);
        self.covariance = p;
        self.landmarks.push(landmark);
    }

    pub fn trace(&self) -> f64 {
        self.covariance.trace()
    }

    /// Smallest covariance eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        self.covariance.clone().symmetric_eigenvalues().min()
    }

    fn vector(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.dimension());
        x[0] = self.pose.x;
        x[1] = self.pose.y;
        x[2] = self.pose.heading;
        for (k, l) in self.landmarks.iter().enumerate() {
            x[3 + 2 * k] = l.x;
            x[4 + 2 * k] = l.y;
        }
        x
    }

    fn set_vector(&mut self, x: &DVector<f64>) {
        self.pose = Pose2::new(x[0], x[1], x[2]);
        for (k, l) in self.landmarks.iter_mut().enumerate() {
            l.x = x[3 + 2 * k];
            l.y = x[4 + 2 * k];
        }
    }
}

fn symmetrize(p: &mut DMatrix<f64>) {
    let t = p.transpose();
    *p += t;
    *p *= 0.5;
}

/// Motion update. The pose follows the unicycle model and the covariance is
/// propagated through its Jacobians with odometry noise mapped onto the pose.
pub fn predict(state: &SlamState, u: &MotionInput, config: &FilterConfig) -> SlamState {
    let f = state_jacobian(&state.pose, u);
    let v = control_jacobian(&state.pose, u);
    let m = Matrix2::new(config.sigma_v.powi(2), 0.0, 0.0, config.sigma_omega.powi(2));
    let q = v * m * v.transpose() + nalgebra::Matrix3::identity() * config.process_floor;

    let n = state.dimension();
    let mut p = state.covariance.clone();
    let pxx = p.fixed_view::<3, 3>(0, 0).into_owned();
    p.fixed_view_mut::<3, 3>(0, 0).copy_from(&(f * pxx * f.transpose() + q));
    if n > 3 {
        let pxm = f * p.view((0, 3), (3, n - 3));
        p.view_mut((0, 3), (3, n - 3)).copy_from(&pxm);
        p.view_mut((3, 0), (n - 3, 3)).copy_from(&pxm.transpose());
    }
    symmetrize(&mut p);
    SlamState { pose: unicycle(&state.pose, u), covariance: p, ..state.clone() }
}

/// Expected measurement of landmark `k` and its Jacobian blocks with respect
/// to the pose and to the landmark.
fn measurement_model(pose: &Pose2, landmark: &MapLandmark) -> (Vector2<f64>, Matrix2x3<f64>, Matrix2<f64>) {
    let (dx, dy) = (landmark.x - pose.x, landmark.y - pose.y);
    let q = dx * dx + dy * dy;
    let r = q.sqrt();
    let (range, bearing) = range_bearing(pose, landmark.x, landmark.y);
    let hx = Matrix2x3::new(-dx / r, -dy / r, 0.0, dy / q, -dx / q, -1.0);
    let hm = Matrix2::new(dx / r, dy / r, -dy / q, dx / q);
    (Vector2::new(range, bearing), hx, hm)
}

/// Kalman update from every measurement of a landmark already in the map.
/// Measurements of unknown ids, or of landmarks sitting on the robot, are
/// left for [`update_map`]. This one update serves both the landmark
/// correction and the odometry fusion step.
pub fn correct(state: &SlamState, z: &Observation, config: &FilterConfig) -> (SlamState, CorrectionResult) {
    let used: Vec<(usize, Vector2<f64>, Vector2<f64>, Matrix2x3<f64>, Matrix2<f64>)> = z
        .measurements
        .iter()
        .filter_map(|m| {
            let k = state.landmark_index(m.id)?;
            let (expected, hx, hm) = measurement_model(&state.pose, &state.landmarks[k]);
            (expected[0] > 1e-9).then_some((k, Vector2::new(m.range, m.bearing), expected, hx, hm))
        })
        .collect();

    let unchanged = |skipped: bool, innovation: DVector<f64>| {
        let result = CorrectionResult {
            pose: state.pose,
            gain: DMatrix::zeros(state.dimension(), 0),
            innovation,
            map_delta: MapDelta::default(),
            skipped,
        };
        (state.clone(), result)
    };
    if used.is_empty() {
        return unchanged(false, DVector::zeros(0));
    }

    let n = state.dimension();
    let rows = 2 * used.len();
    let mut h = DMatrix::zeros(rows, n);
    let mut nu = DVector::zeros(rows);
    let mut r = DMatrix::zeros(rows, rows);
    let noise = config.measurement_noise();
    for (j, (k, measured, expected, hx, hm)) in used.iter().enumerate() {
        h.view_mut((2 * j, 0), (2, 3)).copy_from(hx);
        h.view_mut((2 * j, 3 + 2 * k), (2, 2)).copy_from(hm);
        nu[2 * j] = measured[0] - expected[0];
        nu[2 * j + 1] = wrap_angle(measured[1] - expected[1]);
        r.view_mut((2 * j, 2 * j), (2, 2)).copy_from(&noise);
    }

    let p = &state.covariance;
    let ph = p * h.transpose();
    let mut s = &h * &ph + &r;
    symmetrize(&mut s);
    let Some(chol) = s.clone().cholesky() else {
        log::warn!("innovation covariance is not positive definite; skipping {} measurements", used.len());
        return unchanged(true, nu);
    };
    // K = P Hᵀ S⁻¹, computed as (S⁻¹ H P)ᵀ.
    let gain = chol.solve(&ph.transpose()).transpose();
    let dx = &gain * &nu;

    let ikh = DMatrix::identity(n, n) - &gain * &h;
    let mut p_new = &ikh * p * ikh.transpose() + &gain * &r * gain.transpose();
    symmetrize(&mut p_new);

    let mut next = state.clone();
    let x = state.vector() + &dx;
    next.set_vector(&x);
    next.covariance = p_new;
    let moved = state
        .landmarks
        .iter()
        .enumerate()
        .filter_map(|(k, l)| {
            let shift = [dx[3 + 2 * k], dx[4 + 2 * k]];
            (shift != [0.0, 0.0]).then_some((l.id, shift))
        })
        .collect();
    let result = CorrectionResult {
        pose: next.pose,
        gain,
        innovation: nu,
        map_delta: MapDelta { moved, ..MapDelta::default() },
        skipped: false,
    };
    (next, result)
}

/// The odometry fusion step. It is the same Kalman update as [`correct`].
pub fn fuse(state: &SlamState, z: &Observation, config: &FilterConfig) -> (SlamState, CorrectionResult) {
    correct(state, z, config)
}

/// Adds unseen landmarks by inverse observation from the current pose and
/// integrates every ray into the occupancy grid.
pub fn update_map(state: &SlamState, z: &Observation, config: &FilterConfig) -> (SlamState, MapDelta) {
    let mut next = state.clone();
    let mut delta = MapDelta::default();
    let noise = config.measurement_noise();
    for m in &z.measurements {
        if next.landmark_index(m.id).is_some() || delta.added.iter().any(|l| l.id == m.id) {
            continue;
        }
        let pose = next.pose;
        let angle = pose.heading + m.bearing;
        let (s, c) = angle.sin_cos();
        let landmark = MapLandmark { id: m.id, x: pose.x + m.range * c, y: pose.y + m.range * s };
        let gx = Matrix2x3::new(1.0, 0.0, -m.range * s, 0.0, 1.0, m.range * c);
        let gz = Matrix2::new(c, -m.range * s, s, m.range * c);

        let n = next.dimension();
        let p = &next.covariance;
        let pxx = p.fixed_view::<3, 3>(0, 0).into_owned();
        let p_ll = gx * pxx * gx.transpose() + gz * noise * gz.transpose();
        // Cross-covariance of the new landmark with everything already in the state.
        let p_lx = gx * p.fixed_rows::<3>(0);
        let mut grown = p.clone().resize(n + 2, n + 2, 0.0);
        grown.view_mut((n, 0), (2, n)).copy_from(&p_lx);
        grown.view_mut((0, n), (n, 2)).copy_from(&p_lx.transpose());
        grown.view_mut((n, n), (2, 2)).copy_from(&p_ll);
        symmetrize(&mut grown);
        next.covariance = grown;
        next.landmarks.push(landmark);
        delta.added.push(landmark);
    }
    let origin = next.pose.position();
    for ray in &z.rays {
        let angle = next.pose.heading + ray.bearing;
        let end = origin + Vector2::new(angle.cos(), angle.sin()) * ray.range;
        delta.cells_updated += next.grid.integrate_ray(origin, end, ray.hit);
    }
    (next, delta)
}
