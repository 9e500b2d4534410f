//! Velocity Jacobians and isotropy of a tripod-gait body.
//!
//! Three legs (numbered 1, 3, 5) carry the body. Leg `i` has its hip `Oᵢ` at
//! distance `r_O` and polar angle `γ` in the body frame, is turned by the
//! passive angle `α` relative to the body, and drives its foot `Sᵢ = (a, q)`
//! (leg frame) along the leg `y` axis. With the feet fixed on the ground the
//! body velocity `ẋ = (ξ̇, η̇, L θ̇)` and the leg rates `q̇` obey
//! `A ẋ = B q̇`, `B = -diag(q)`.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Matrix3, Matrix6, Vector2, Vector3, Vector6};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fourbar::{rotation, wrap_angle};

type Point = Vector2<f64>;

/// Relative determinant threshold below which `A` counts as singular.
pub const SINGULAR_DETERMINANT: f64 = 1e-12;
const SINGULAR_SINE: f64 = 1e-12;
pub const FK_MAX_ITERATIONS: usize = 50;
pub const FK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IsotropyError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("leg {leg} is singular: its foot lies on the leg x-axis")]
    SingularLeg { leg: usize },
    #[error("singular configuration (|det A| = {det:e})")]
    SingularConfiguration { det: f64 },
    #[error("isotropic family undefined: sin(α₁ + β − γ₁) = 0")]
    UndefinedFamily,
    #[error("forward kinematics did not converge (residual {residual:e})")]
    FkDiverged { residual: f64 },
}

/// Leg numbers used in reports, in storage order.
pub const LEG_NUMBERS: [usize; 3] = [1, 3, 5];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripodLeg {
    /// Distance from the body centre to the hip.
    pub r_o: f64,
    /// Polar angle of the hip in the body frame.
    pub gamma: f64,
    /// Leg-frame angle relative to the body.
    pub alpha: f64,
    /// Fixed leg-frame x-offset of the foot.
    pub a: f64,
    /// Leg-frame y-coordinate of the foot (the actuated coordinate).
    pub q: f64,
}

impl TripodLeg {
    /// Direction angle of the foot in the leg frame.
    pub fn beta(&self) -> f64 {
        self.q.atan2(self.a)
    }

    /// `uᵢ = r_O sin(α + β − γ)`.
    pub fn u(&self) -> f64 {
        self.r_o * (self.alpha + self.beta() - self.gamma).sin()
    }

    fn hip_local(&self) -> Point {
        Point::new(self.r_o * self.gamma.cos(), self.r_o * self.gamma.sin())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripodConfig {
    /// Legs 1, 3 and 5.
    pub legs: [TripodLeg; 3],
    /// Body heading.
    pub theta: f64,
    /// Length that scales `θ` into the body coordinate vector.
    pub length: f64,
    #[serde(default)]
    pub xi: f64,
    #[serde(default)]
    pub eta: f64,
}

impl TripodConfig {
    pub fn validate(&self) -> Result<(), IsotropyError> {
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(IsotropyError::InvalidConfig(format!(
                "characteristic length must be positive, got {}",
                self.length
            )));
        }
        for (leg, number) in self.legs.iter().zip(LEG_NUMBERS) {
            let values = [leg.r_o, leg.gamma, leg.alpha, leg.a, leg.q];
            if values.iter().any(|v| !v.is_finite()) {
                return Err(IsotropyError::InvalidConfig(format!("leg {number} has non-finite values")));
            }
            if leg.r_o <= 0.0 {
                return Err(IsotropyError::InvalidConfig(format!("leg {number}: r_O must be positive")));
            }
            if leg.beta().sin().abs() < SINGULAR_SINE || leg.q == 0.0 {
                return Err(IsotropyError::SingularLeg { leg: number });
            }
        }
        Ok(())
    }

    /// World positions of the three feet.
    pub fn feet(&self) -> [Point; 3] {
        let centre = Point::new(self.xi, self.eta);
        self.legs.map(|leg| {
            centre
                + rotation(self.theta) * leg.hip_local()
                + rotation(self.theta + leg.alpha) * Point::new(leg.a, leg.q)
        })
    }

    /// Body coordinate vector `(ξ, η, L θ)`.
    pub fn body_coordinates(&self) -> Vector3<f64> {
        Vector3::new(self.xi, self.eta, self.length * self.theta)
    }

    pub fn q(&self) -> Vector3<f64> {
        Vector3::new(self.legs[0].q, self.legs[1].q, self.legs[2].q)
    }
}

/// `dq/dx` in closed trigonometric form. Row `i` is
/// `-[cos(θ+α+β), sin(θ+α+β), r_O sin(α+β−γ)/L] / sin β`.
pub fn inverse_jacobian(config: &TripodConfig) -> Result<Matrix3<f64>, IsotropyError> {
    config.validate()?;
    let mut m = Matrix3::zeros();
    for (i, leg) in config.legs.iter().enumerate() {
        let beta = leg.beta();
        let heading = config.theta + leg.alpha + beta;
        let s = beta.sin();
        m[(i, 0)] = -heading.cos() / s;
        m[(i, 1)] = -heading.sin() / s;
        m[(i, 2)] = -leg.u() / (config.length * s);
    }
    Ok(m)
}

/// Matrix `A` of `A ẋ = B q̇`, built from rotations and planar cross products.
pub fn matrix_a(config: &TripodConfig) -> Matrix3<f64> {
    let mut a = Matrix3::zeros();
    for (i, leg) in config.legs.iter().enumerate() {
        let foot = rotation(config.theta + leg.alpha) * Point::new(leg.a, leg.q);
        let hip = rotation(config.theta) * leg.hip_local();
        a[(i, 0)] = foot.x;
        a[(i, 1)] = foot.y;
        a[(i, 2)] = (hip.x * foot.y - hip.y * foot.x) / config.length;
    }
    a
}

/// `B = -diag(q)`.
pub fn matrix_b(config: &TripodConfig) -> Matrix3<f64> {
    Matrix3::from_diagonal(&(-config.q()))
}

/// `J_q = A⁻¹ B`, i.e. `dx/dq`.
pub fn jacobian_via_ab(config: &TripodConfig) -> Result<Matrix3<f64>, IsotropyError> {
    config.validate()?;
    let a = matrix_a(config);
    let det = a.determinant();
    let scale = a.norm();
    if det.abs() < SINGULAR_DETERMINANT * scale.powi(3) {
        return Err(IsotropyError::SingularConfiguration { det });
    }
    let inv = a.try_inverse().ok_or(IsotropyError::SingularConfiguration { det })?;
    Ok(inv * matrix_b(config))
}

/// Six isotropy residuals: two differences of the diagonal sums, the three
/// off-diagonal sums, and the spread of the `uᵢ`.
pub fn isotropy_residuals(config: &TripodConfig) -> Result<[f64; 6], IsotropyError> {
    config.validate()?;
    let mut sums = [0.0; 6];
    for leg in &config.legs {
        let beta = leg.beta();
        let heading = config.theta + leg.alpha + beta;
        let s2 = beta.sin().powi(2);
        let (c, s) = (heading.cos(), heading.sin());
        let w = leg.u() / config.length;
        sums[0] += c * c / s2;
        sums[1] += s * s / s2;
        sums[2] += w * w / s2;
        sums[3] += c * s / s2;
        sums[4] += c * w / s2;
        sums[5] += s * w / s2;
    }
    let u = config.legs.map(|l| l.u());
    let spread = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| (u[i] - u[j]).abs())
        .fold(0.0, f64::max);
    Ok([sums[0] - sums[1], sums[1] - sums[2], sums[3], sums[4], sums[5], spread])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsotropyCheck {
    pub isotropic: bool,
    /// `1/√(mean diagonal of (J_q⁻¹)ᵀ J_q⁻¹)`.
    pub lambda: f64,
    /// 2-norm condition number of `J_q⁻¹`.
    pub condition: f64,
}

/// Tests `(J_q⁻¹)ᵀ J_q⁻¹ = (1/λ²) E` with tolerance relative to the matrix norm.
pub fn is_isotropic(config: &TripodConfig, tol: f64) -> Result<IsotropyCheck, IsotropyError> {
    let inv = inverse_jacobian(config)?;
    let m = inv.transpose() * inv;
    let scale = m.norm();
    let mut off = 0.0f64;
    let mut spread = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                off = off.max(m[(i, j)].abs());
            }
            spread = spread.max((m[(i, i)] - m[(j, j)]).abs());
        }
    }
    let isotropic = off <= tol * scale && spread <= tol * scale;
    let lambda = 1.0 / (m.trace() / 3.0).sqrt();
    let sv = inv.singular_values();
    let condition = sv.max() / sv.min();
    Ok(IsotropyCheck { isotropic, lambda, condition })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotropyReport {
    pub residuals: [f64; 6],
    pub isotropic: bool,
    /// Reported only for isotropic configurations.
    pub lambda: Option<f64>,
    pub u: [f64; 3],
    pub condition: f64,
    pub config: TripodConfig,
}

pub fn isotropy_report(config: &TripodConfig, tol: f64) -> Result<IsotropyReport, IsotropyError> {
    let residuals = isotropy_residuals(config)?;
    let check = is_isotropic(config, tol)?;
    Ok(IsotropyReport {
        residuals,
        isotropic: check.isotropic,
        lambda: check.isotropic.then_some(check.lambda),
        u: config.legs.map(|l| l.u()),
        condition: check.condition,
        config: *config,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyVariant {
    /// `α₃ = α₁ − 2π/3`, `α₅ = α₁ + 2π/3`.
    First,
    /// Legs 3 and 5 swapped.
    Second,
}

/// Member of the closed-form isotropic family, with `q = 1`, `θ = 0` and the
/// body centre at the origin.
///
/// `r_O = ±L/(√2 sin(α₁+β−γ₁))`; a negative value is stored as its magnitude
/// with every `γᵢ` turned by `π`, which leaves `uᵢ` unchanged.
pub fn closed_form_family(
    alpha1: f64,
    gamma1: f64,
    beta: f64,
    length: f64,
    variant: FamilyVariant,
    positive: bool,
) -> Result<TripodConfig, IsotropyError> {
    if !(beta > 0.0 && beta < PI) {
        return Err(IsotropyError::InvalidConfig(format!("β must lie in (0, π), got {beta}")));
    }
    if !(length.is_finite() && length > 0.0) {
        return Err(IsotropyError::InvalidConfig("characteristic length must be positive".into()));
    }
    let s = (alpha1 + beta - gamma1).sin();
    if s.abs() < SINGULAR_SINE {
        return Err(IsotropyError::UndefinedFamily);
    }
    let sign = if positive { 1.0 } else { -1.0 };
    let r_o = sign * length / (2f64.sqrt() * s);
    let third = TAU / 3.0;
    let offsets = match variant {
        FamilyVariant::First => [0.0, -third, third],
        FamilyVariant::Second => [0.0, third, -third],
    };
    let q = 1.0;
    let a = beta.cos() / beta.sin();
    let legs = offsets.map(|d| {
        let gamma = gamma1 + d;
        TripodLeg {
            r_o: r_o.abs(),
            gamma: if r_o < 0.0 { wrap_angle(gamma + PI) } else { gamma },
            alpha: alpha1 + d,
            a,
            q,
        }
    });
    Ok(TripodConfig { legs, theta: 0.0, length, xi: 0.0, eta: 0.0 })
}

fn perp(v: Point) -> Point {
    Point::new(-v.y, v.x)
}

fn closure(config: &TripodConfig, feet: &[Point; 3]) -> Vector6<f64> {
    let now = config.feet();
    let mut r = Vector6::zeros();
    for i in 0..3 {
        let d = now[i] - feet[i];
        r[2 * i] = d.x;
        r[2 * i + 1] = d.y;
    }
    r
}

/// Body pose and passive leg angles that place the feet at `feet` for leg
/// coordinates `q`, by Newton iteration from `seed`.
///
/// Returns the solved configuration and its closure residual (max norm).
pub fn forward_kinematics(
    feet: &[Point; 3],
    seed: &TripodConfig,
    q: [f64; 3],
) -> Result<(TripodConfig, f64), IsotropyError> {
    let mut config = *seed;
    for (leg, &qi) in config.legs.iter_mut().zip(&q) {
        leg.q = qi;
    }
    config.validate()?;
    let mut residual = closure(&config, feet);
    for _ in 0..FK_MAX_ITERATIONS {
        let err = residual.amax();
        if err <= FK_TOLERANCE {
            return Ok((config, err));
        }
        let mut jac = Matrix6::zeros();
        for (i, leg) in config.legs.iter().enumerate() {
            let foot = rotation(config.theta + leg.alpha) * Point::new(leg.a, leg.q);
            let hip = rotation(config.theta) * leg.hip_local();
            let d_theta = perp(hip + foot);
            let d_alpha = perp(foot);
            let rows = 2 * i;
            jac.fixed_view_mut::<2, 2>(rows, 0).copy_from(&Matrix2::identity());
            jac[(rows, 2)] = d_theta.x;
            jac[(rows + 1, 2)] = d_theta.y;
            jac[(rows, 3 + i)] = d_alpha.x;
            jac[(rows + 1, 3 + i)] = d_alpha.y;
        }
        let step = jac
            .lu()
            .solve(&(-residual))
            .ok_or(IsotropyError::FkDiverged { residual: err })?;
        config.xi += step[0];
        config.eta += step[1];
        config.theta += step[2];
        for i in 0..3 {
            config.legs[i].alpha += step[3 + i];
        }
        residual = closure(&config, feet);
    }
    let err = residual.amax();
    if err <= FK_TOLERANCE {
        Ok((config, err))
    } else {
        Err(IsotropyError::FkDiverged { residual: err })
    }
}
