use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Matrix3x2, Vector2};
use serde::{Deserialize, Serialize};

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    if angle > -PI && angle <= PI {
        return angle;
    }
    let wrapped = angle.rem_euclid(TAU);
    if wrapped > PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading: wrap_angle(heading) }
    }

    pub fn position(&self) -> Vector2<f64> {
        Vector2::new(self.x, self.y)
    }

    pub fn distance(&self, other: &Pose2) -> f64 {
        (self.position() - other.position()).norm()
    }
}

/// Velocity command held for `dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionInput {
    pub v: f64,
    pub omega: f64,
    pub dt: f64,
}

impl MotionInput {
    pub fn new(v: f64, omega: f64, dt: f64) -> Self {
        Self { v, omega, dt }
    }

    pub fn is_valid(&self) -> bool {
        self.v.is_finite() && self.omega.is_finite() && self.dt.is_finite() && self.dt > 0.0
    }
}

/// First-order unicycle step: translate along the current heading, then turn.
///
/// Against the exact constant-twist arc the position error is at most
/// `|v| |ω| dt² / 2`.
pub fn unicycle(pose: &Pose2, u: &MotionInput) -> Pose2 {
    let (s, c) = pose.heading.sin_cos();
    Pose2::new(pose.x + u.v * c * u.dt, pose.y + u.v * s * u.dt, pose.heading + u.omega * u.dt)
}

/// Jacobian of [`unicycle`] with respect to the pose.
pub fn state_jacobian(pose: &Pose2, u: &MotionInput) -> Matrix3<f64> {
    let (s, c) = pose.heading.sin_cos();
    Matrix3::new(1.0, 0.0, -u.v * s * u.dt, 0.0, 1.0, u.v * c * u.dt, 0.0, 0.0, 1.0)
}

/// Jacobian of [`unicycle`] with respect to `(v, ω)`.
pub fn control_jacobian(pose: &Pose2, u: &MotionInput) -> Matrix3x2<f64> {
    let (s, c) = pose.heading.sin_cos();
    Matrix3x2::new(c * u.dt, 0.0, s * u.dt, 0.0, 0.0, u.dt)
}

/// Exact pose after following a constant `(v, ω)` for `dt`.
pub fn exact_arc(pose: &Pose2, u: &MotionInput) -> Pose2 {
    let theta = pose.heading;
    if u.omega.abs() < 1e-12 {
        return unicycle(pose, u);
    }
    let r = u.v / u.omega;
    let end = theta + u.omega * u.dt;
    Pose2::new(pose.x + r * (end.sin() - theta.sin()), pose.y - r * (end.cos() - theta.cos()), end)
}
