//! Least-squares fit of a coupler point to a straight, uniformly traversed
//! foot trajectory.
//!
//! For a fixed crank sweep the foot positions are linear in the unknowns
//! `x = (x_E, y_E, X⁰, Y⁰, L_x, L_y)`: the coupler-point coordinates in the
//! coupler frame, the line start point and the line displacement. Minimizing
//! the mean squared distance between foot points `E_i` and target points
//! `(X⁰ + L_x k_i, Y⁰ + L_y k_i)` is therefore a 6x6 symmetric linear system.

use nalgebra::{Matrix2, Matrix6, Vector2, Vector6};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fourbar::{self, CrankSchedule, FourBarParams, KinematicsError, Point, Pose};

/// Condition number above which the minimum-norm solution is used.
pub const RANK_DEFICIENCY_THRESHOLD: f64 = 1e10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error("sweep has {poses} poses but schedule has {weights} weights")]
    LengthMismatch { poses: usize, weights: usize },
    #[error("no poses to synthesize from")]
    Empty,
    #[error("linear system has non-finite entries")]
    InvalidSystem,
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
}

/// Straight target trajectory `P(k) = start + k·displacement`, `k ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineTarget {
    pub start: Point,
    pub displacement: Vector2<f64>,
}

impl LineTarget {
    pub fn length(&self) -> f64 {
        self.displacement.norm()
    }

    pub fn angle(&self) -> f64 {
        self.displacement.y.atan2(self.displacement.x)
    }

    pub fn point_at(&self, k: f64) -> Point {
        self.start + self.displacement * k
    }
}

/// Normal equations `A x = b` of the mean-square trajectory error, plus the
/// constant term so that `δ(x) = xᵀAx - 2bᵀx + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub matrix: Matrix6<f64>,
    pub rhs: Vector6<f64>,
    /// `mean(X_B² + Y_B²)`
    pub offset: f64,
}

impl LinearSystem {
    /// Mean-square error of `x`, evaluated from the quadratic form.
    pub fn quadratic_delta(&self, x: &Vector6<f64>) -> f64 {
        ((self.matrix * x).dot(x) - 2.0 * self.rhs.dot(x) + self.offset).max(0.0)
    }

    fn is_finite(&self) -> bool {
        self.matrix.iter().chain(self.rhs.iter()).all(|v| v.is_finite()) && self.offset.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSolution {
    pub x: Vector6<f64>,
    /// Mean squared residual.
    pub delta: f64,
    /// Condition number of the normal matrix.
    pub condition: f64,
    /// Set when the minimum-norm solution was taken.
    pub rank_deficient: bool,
}

impl SynthesisSolution {
    pub fn coupler_point(&self) -> Point {
        Point::new(self.x[0], self.x[1])
    }

    pub fn target(&self) -> LineTarget {
        LineTarget {
            start: Point::new(self.x[2], self.x[3]),
            displacement: Vector2::new(self.x[4], self.x[5]),
        }
    }

    /// Root-mean-square foot deviation, in ground-link units.
    pub fn rms_deviation(&self) -> f64 {
        self.delta.sqrt()
    }

    /// RMS deviation relative to the stroke length `L`.
    pub fn normalized_rms(&self) -> f64 {
        let length = self.target().length();
        if length > 0.0 {
            self.rms_deviation() / length
        } else {
            f64::INFINITY
        }
    }
}

fn check_lengths(poses: &[Pose], schedule: &CrankSchedule) -> Result<(), SynthesisError> {
    if poses.is_empty() {
        return Err(SynthesisError::Empty);
    }
    if poses.len() != schedule.weights.len() {
        return Err(SynthesisError::LengthMismatch {
            poses: poses.len(),
            weights: schedule.weights.len(),
        });
    }
    Ok(())
}

/// Builds the block matrix
///
/// ```text
///     | E    A1   A2          |
/// A = | A1ᵀ  E    ½E          |
///     | A2ᵀ  ½E   mean(k²)·E  |
/// ```
///
/// with `A1 = -mean(Γ(β)ᵀ)` and `A2 = -mean(k·Γ(β)ᵀ)`, and the right-hand side
/// `b = -mean(Gᵀ R_B)`.
pub fn assemble(poses: &[Pose], schedule: &CrankSchedule) -> Result<LinearSystem, SynthesisError> {
    check_lengths(poses, schedule)?;
    let n = poses.len() as f64;
    let (mut cos_sum, mut sin_sum, mut kcos_sum, mut ksin_sum) = (0.0, 0.0, 0.0, 0.0);
    let (mut k_sum, mut k2_sum) = (0.0, 0.0);
    let mut rhs = Vector6::zeros();
    let mut offset = 0.0;
    for (pose, &k) in poses.iter().zip(&schedule.weights) {
        let (s, c) = pose.beta.sin_cos();
        let (x, y) = (pose.b.x, pose.b.y);
        cos_sum += c;
        sin_sum += s;
        kcos_sum += k * c;
        ksin_sum += k * s;
        k_sum += k;
        k2_sum += k * k;
        rhs[0] -= x * c + y * s;
        rhs[1] += x * s - y * c;
        rhs[2] += x;
        rhs[3] += y;
        rhs[4] += k * x;
        rhs[5] += k * y;
        offset += x * x + y * y;
    }
    rhs /= n;
    offset /= n;

    let identity = Matrix2::identity();
    let a1 = Matrix2::new(-cos_sum, -sin_sum, sin_sum, -cos_sum) / n;
    let a2 = Matrix2::new(-kcos_sum, -ksin_sum, ksin_sum, -kcos_sum) / n;
    let k_mean = k_sum / n;
    let k2_mean = k2_sum / n;

    let mut matrix = Matrix6::zeros();
    matrix.fixed_view_mut::<2, 2>(0, 0).copy_from(&identity);
    matrix.fixed_view_mut::<2, 2>(0, 2).copy_from(&a1);
    matrix.fixed_view_mut::<2, 2>(0, 4).copy_from(&a2);
    matrix.fixed_view_mut::<2, 2>(2, 0).copy_from(&a1.transpose());
    matrix.fixed_view_mut::<2, 2>(2, 2).copy_from(&identity);
    matrix.fixed_view_mut::<2, 2>(2, 4).copy_from(&(identity * k_mean));
    matrix.fixed_view_mut::<2, 2>(4, 0).copy_from(&a2.transpose());
    matrix.fixed_view_mut::<2, 2>(4, 2).copy_from(&(identity * k_mean));
    matrix.fixed_view_mut::<2, 2>(4, 4).copy_from(&(identity * k2_mean));

    Ok(LinearSystem { matrix, rhs, offset })
}

/// Solves the normal equations.
///
/// Well-conditioned systems go through a Cholesky factorization (LU if that
/// fails). Above [`RANK_DEFICIENCY_THRESHOLD`] the minimum-norm least-squares
/// solution is returned with `rank_deficient` set.
pub fn solve(system: &LinearSystem) -> Result<SynthesisSolution, SynthesisError> {
    if !system.is_finite() {
        return Err(SynthesisError::InvalidSystem);
    }
    let eigen = system.matrix.symmetric_eigen();
    let largest = eigen.eigenvalues.max();
    let smallest = eigen.eigenvalues.min();
    let condition = if smallest > 0.0 { largest / smallest } else { f64::INFINITY };

    let (x, rank_deficient) = if condition > RANK_DEFICIENCY_THRESHOLD {
        let cutoff = largest.max(0.0) / RANK_DEFICIENCY_THRESHOLD;
        let mut x = Vector6::zeros();
        for (i, &lambda) in eigen.eigenvalues.iter().enumerate() {
            if lambda > cutoff {
                let v = eigen.eigenvectors.column(i);
                x += v * (v.dot(&system.rhs) / lambda);
            }
        }
        (x, true)
    } else if let Some(chol) = system.matrix.cholesky() {
        (chol.solve(&system.rhs), false)
    } else {
        let x = system.matrix.lu().solve(&system.rhs).ok_or(SynthesisError::InvalidSystem)?;
        (x, false)
    };

    Ok(SynthesisSolution { x, delta: system.quadratic_delta(&x), condition, rank_deficient })
}

/// Mean squared foot deviation for the unknowns `x`, summed directly over the
/// sweep.
pub fn residual_delta(
    poses: &[Pose],
    schedule: &CrankSchedule,
    x: &Vector6<f64>,
) -> Result<f64, SynthesisError> {
    check_lengths(poses, schedule)?;
    let total: f64 = poses
        .iter()
        .zip(&schedule.weights)
        .map(|(pose, &k)| {
            let (s, c) = pose.beta.sin_cos();
            let rx = pose.b.x + x[0] * c - x[1] * s - x[2] - x[4] * k;
            let ry = pose.b.y + x[0] * s + x[1] * c - x[3] - x[5] * k;
            rx * rx + ry * ry
        })
        .sum();
    Ok(total / poses.len() as f64)
}

/// Sweep settings shared by the reduced objective and the searches built on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSettings {
    /// Number of crank samples `N` over the support arc.
    pub samples: usize,
    /// Largest allowed coupler-angle step between samples, radians.
    pub continuity_bound: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self { samples: 32, continuity_bound: fourbar::DEFAULT_CONTINUITY_BOUND }
    }
}

/// Full evaluation of one parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedEvaluation {
    pub schedule: CrankSchedule,
    pub poses: Vec<Pose>,
    pub solution: SynthesisSolution,
}

impl ReducedEvaluation {
    /// The reduced objective `δ⁰`.
    pub fn delta(&self) -> f64 {
        self.solution.delta
    }
}

/// Sweep, assemble, solve and measure: `δ⁰(P) = δ(P, A⁻¹(P) b(P))`.
pub fn reduced_objective(
    params: &FourBarParams,
    settings: &SweepSettings,
) -> Result<ReducedEvaluation, SynthesisError> {
    params.validate()?;
    let schedule = params.schedule(settings.samples)?;
    let poses = fourbar::sweep_schedule(params, &schedule, settings.continuity_bound)?;
    let system = assemble(&poses, &schedule)?;
    let mut solution = solve(&system)?;
    solution.delta = residual_delta(&poses, &schedule, &solution.x)?;
    Ok(ReducedEvaluation { schedule, poses, solution })
}
