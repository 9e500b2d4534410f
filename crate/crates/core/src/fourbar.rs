//! Position analysis of the normalized four-bar linkage `ABCD`.
//!
//! The frame pivots are fixed at `A = (0, 0)` and `D = (1, 0)`, so every length
//! is a ratio to the ground link `AD`. The crank `AB` turns through the support
//! arc `[φ₀, φ₀ + Φ_SUP]`; the coupler `BC` carries the foot point.

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Point = Vector2<f64>;

/// Absolute tolerance on the circle-intersection discriminant below which a
/// configuration counts as tangent (links `BC` and `CD` aligned).
pub const DEGENERATE_TOLERANCE: f64 = 1e-9;

/// Default bound on the coupler-angle jump between consecutive sweep samples.
pub const DEFAULT_CONTINUITY_BOUND: f64 = PI / 4.0;

/// Ground pivot `D` in the normalized frame.
pub const PIVOT_D: Point = Point::new(1.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KinematicsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("linkage cannot be assembled at crank angle {phi:.6} rad (closure gap {gap:.3e})")]
    NotAssemblable { phi: f64, gap: f64 },
    #[error("degenerate configuration at crank angle {phi:.6} rad")]
    DegenerateConfiguration { phi: f64 },
    #[error("sweep invalid at sample {index}: {fault}")]
    SweepInvalid { index: usize, fault: SweepFault },
    #[error("dead point: transmission angle is zero")]
    SingularTransmission,
}

/// Why a sweep sample was rejected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepFault {
    NotAssemblable { gap: f64 },
    Degenerate,
    /// Coupler angle jumped by more than the continuity bound; the samples no
    /// longer belong to one continuous assembly mode.
    Discontinuous { jump: f64 },
}

impl fmt::Display for SweepFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepFault::NotAssemblable { gap } => write!(f, "not assemblable (gap {gap:.3e})"),
            SweepFault::Degenerate => write!(f, "degenerate tangency"),
            SweepFault::Discontinuous { jump } => {
                write!(f, "branch discontinuity (coupler jump {jump:.4} rad)")
            }
        }
    }
}

/// Assembly mode: which of the two circle intersections is taken for `C`.
///
/// `Positive` puts `C` on the left of the directed line `B -> D`, i.e. the
/// cross product `(D - B) x (C - B)` is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Positive,
    Negative,
}

impl Branch {
    pub fn opposite(self) -> Self {
        match self {
            Branch::Positive => Branch::Negative,
            Branch::Negative => Branch::Positive,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Branch::Positive => 1.0,
            Branch::Negative => -1.0,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Positive => f.write_str("positive"),
            Branch::Negative => f.write_str("negative"),
        }
    }
}

/// Normalized linkage dimensions and crank schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourBarParams {
    /// `l_AB / l_AD`
    pub crank: f64,
    /// `l_BC / l_AD`
    pub coupler: f64,
    /// `l_CD / l_AD`
    pub rocker: f64,
    /// Crank angle at the start of the support phase, radians.
    pub start_angle: f64,
    /// Crank arc of the support phase, radians, in `(π, 2π)`.
    pub support_arc: f64,
    #[serde(default)]
    pub branch: Branch,
}

impl FourBarParams {
    pub fn new(
        crank: f64,
        coupler: f64,
        rocker: f64,
        start_angle: f64,
        support_arc: f64,
        branch: Branch,
    ) -> Result<Self, KinematicsError> {
        let params = Self { crank, coupler, rocker, start_angle, support_arc, branch };
        params.validate()?;
        Ok(params)
    }

    /// Builds parameters from the five-component design vector `(p1..p5)`.
    pub fn from_genome(genome: &[f64], branch: Branch) -> Result<Self, KinematicsError> {
        match genome {
            [p1, p2, p3, p4, p5] => Self::new(*p1, *p2, *p3, *p4, *p5, branch),
            _ => Err(KinematicsError::InvalidArgument(format!(
                "expected 5 linkage parameters, got {}",
                genome.len()
            ))),
        }
    }

    pub fn genome(&self) -> [f64; 5] {
        [self.crank, self.coupler, self.rocker, self.start_angle, self.support_arc]
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        let lengths = [("crank", self.crank), ("coupler", self.coupler), ("rocker", self.rocker)];
        for (name, value) in lengths {
            if !(value.is_finite() && value > 0.0) {
                return Err(KinematicsError::InvalidArgument(format!(
                    "{name} ratio must be positive, got {value}"
                )));
            }
        }
        if !self.start_angle.is_finite() {
            return Err(KinematicsError::InvalidArgument("start angle must be finite".into()));
        }
        if !(self.support_arc > PI && self.support_arc < TAU) {
            return Err(KinematicsError::InvalidArgument(format!(
                "support arc must lie in (π, 2π), got {}",
                self.support_arc
            )));
        }
        Ok(())
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    /// Crank pivot position `B` at crank angle `phi`.
    pub fn crank_pin(&self, phi: f64) -> Point {
        Point::new(self.crank * phi.cos(), self.crank * phi.sin())
    }

    pub fn schedule(&self, samples: usize) -> Result<CrankSchedule, KinematicsError> {
        sample_schedule(self.start_angle, self.support_arc, samples)
    }
}

/// Crank angles `φᵢ = φ₀ + Φ·kᵢ` with weights `kᵢ = (i - 1) / (N - 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrankSchedule {
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CrankSchedule {
    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

pub fn sample_schedule(
    start_angle: f64,
    support_arc: f64,
    samples: usize,
) -> Result<CrankSchedule, KinematicsError> {
    if samples < 2 {
        return Err(KinematicsError::InvalidArgument(format!(
            "a crank schedule needs at least 2 samples, got {samples}"
        )));
    }
    let last = (samples - 1) as f64;
    let weights: Vec<f64> = (0..samples).map(|i| i as f64 / last).collect();
    let angles = weights.iter().map(|k| start_angle + support_arc * k).collect();
    Ok(CrankSchedule { angles, weights })
}

/// Counter-clockwise rotation matrix.
pub fn rotation(angle: f64) -> Matrix2<f64> {
    let (s, c) = angle.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// One assembled position of the linkage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub phi: f64,
    pub b: Point,
    pub c: Point,
    /// Direction of `BC` from the x-axis, radians.
    pub beta: f64,
    /// Classical transmission angle at `C`, folded into `[0, π/2]`.
    pub transmission: f64,
}

impl Pose {
    /// World position of a point given in the coupler frame (origin `B`,
    /// x-axis along `BC`).
    pub fn coupler_point(&self, local: &Point) -> Point {
        self.b + rotation(self.beta) * local
    }
}

/// Folded transmission angle from the law of cosines, given `|BD|`.
pub fn transmission_angle(coupler: f64, rocker: f64, diagonal: f64) -> f64 {
    let cos = (coupler * coupler + rocker * rocker - diagonal * diagonal) / (2.0 * coupler * rocker);
    let interior = cos.clamp(-1.0, 1.0).acos();
    interior.min(PI - interior)
}

fn closure_gap(params: &FourBarParams, diagonal: f64) -> f64 {
    let too_far = diagonal - (params.coupler + params.rocker);
    let too_near = (params.coupler - params.rocker).abs() - diagonal;
    too_far.max(too_near).max(0.0)
}

pub fn solve_position(params: &FourBarParams, phi: f64) -> Result<Pose, KinematicsError> {
    let b = params.crank_pin(phi);
    let bd = PIVOT_D - b;
    let diagonal = bd.norm();
    if diagonal < DEGENERATE_TOLERANCE {
        return Err(KinematicsError::DegenerateConfiguration { phi });
    }
    let (p2, p3) = (params.coupler, params.rocker);
    let along = (p2 * p2 - p3 * p3 + diagonal * diagonal) / (2.0 * diagonal);
    let discriminant = p2 * p2 - along * along;
    if discriminant < -DEGENERATE_TOLERANCE {
        return Err(KinematicsError::NotAssemblable { phi, gap: closure_gap(params, diagonal) });
    }
    if discriminant.abs() <= DEGENERATE_TOLERANCE {
        return Err(KinematicsError::DegenerateConfiguration { phi });
    }
    let unit = bd / diagonal;
    let normal = Point::new(-unit.y, unit.x);
    let c = b + unit * along + normal * (params.branch.sign() * discriminant.sqrt());
    let bc = c - b;
    Ok(Pose {
        phi,
        b,
        c,
        beta: bc.y.atan2(bc.x),
        transmission: transmission_angle(p2, p3, diagonal),
    })
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let wrapped = angle.rem_euclid(TAU);
    if wrapped > PI {
        wrapped - TAU
    } else {
        wrapped
    }
}

/// Solves every schedule sample on the parameters' branch.
pub fn sweep(params: &FourBarParams, samples: usize) -> Result<Vec<Pose>, KinematicsError> {
    sweep_with_bound(params, samples, DEFAULT_CONTINUITY_BOUND)
}

/// As [`sweep`], rejecting coupler-angle jumps larger than `continuity_bound`.
///
/// The branch is never switched to repair a sweep; any unassemblable or
/// discontinuous sample rejects the whole sweep with its index.
pub fn sweep_with_bound(
    params: &FourBarParams,
    samples: usize,
    continuity_bound: f64,
) -> Result<Vec<Pose>, KinematicsError> {
    params.validate()?;
    let schedule = params.schedule(samples)?;
    sweep_schedule(params, &schedule, continuity_bound)
}

pub fn sweep_schedule(
    params: &FourBarParams,
    schedule: &CrankSchedule,
    continuity_bound: f64,
) -> Result<Vec<Pose>, KinematicsError> {
    let mut poses: Vec<Pose> = Vec::with_capacity(schedule.len());
    for (index, &phi) in schedule.angles.iter().enumerate() {
        let pose = solve_position(params, phi).map_err(|err| {
            let fault = match err {
                KinematicsError::NotAssemblable { gap, .. } => SweepFault::NotAssemblable { gap },
                _ => SweepFault::Degenerate,
            };
            KinematicsError::SweepInvalid { index, fault }
        })?;
        if let Some(prev) = poses.last() {
            let jump = wrap_angle(pose.beta - prev.beta).abs();
            if jump > continuity_bound {
                return Err(KinematicsError::SweepInvalid {
                    index,
                    fault: SweepFault::Discontinuous { jump },
                });
            }
        }
        poses.push(pose);
    }
    Ok(poses)
}

/// Total closure gap over the schedule; zero iff every sample can be assembled.
pub fn assembly_violation(params: &FourBarParams, schedule: &CrankSchedule) -> f64 {
    schedule
        .angles
        .iter()
        .map(|&phi| closure_gap(params, (PIVOT_D - params.crank_pin(phi)).norm()))
        .sum()
}

/// Step-cycle figures of a support sweep. Angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaitMetrics {
    pub support_arc_deg: f64,
    pub transfer_arc_deg: f64,
    /// `Φ_SUP / Φ_TRANSF`
    pub step_cycle_ratio: f64,
    pub min_transmission_deg: f64,
}

pub fn step_cycle_ratio(support_arc_deg: f64) -> f64 {
    support_arc_deg / (360.0 - support_arc_deg)
}

pub fn gait_metrics(params: &FourBarParams, poses: &[Pose]) -> GaitMetrics {
    let support_arc_deg = params.support_arc.to_degrees();
    let transfer_arc_deg = 360.0 - support_arc_deg;
    let min_transmission = poses.iter().map(|p| p.transmission).fold(f64::INFINITY, f64::min);
    GaitMetrics {
        support_arc_deg,
        transfer_arc_deg,
        step_cycle_ratio: support_arc_deg / transfer_arc_deg,
        min_transmission_deg: min_transmission.to_degrees(),
    }
}

/// Force-transmission angle `arctan(|F_v| / |F_h|)`.
///
/// The coupler is a massless two-force member, so the transmitted force acts
/// along `BC` and only the pose's coupler direction matters.
pub fn force_ratio_angle(pose: &Pose) -> Result<f64, KinematicsError> {
    if pose.transmission <= f64::EPSILON {
        return Err(KinematicsError::SingularTransmission);
    }
    let bc = pose.c - pose.b;
    Ok(bc.y.abs().atan2(bc.x.abs()))
}
