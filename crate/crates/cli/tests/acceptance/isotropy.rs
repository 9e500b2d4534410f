use std::f64::consts::{FRAC_PI_3, PI};

use legkit_core::isotropy::{
    closed_form_family, forward_kinematics, inverse_jacobian, is_isotropic, isotropy_residuals, jacobian_via_ab,
    matrix_a, FamilyVariant, TripodConfig, TripodLeg,
};
use nalgebra::Matrix3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::{ensure, rng, Verdict};

pub fn closed_forms() -> Verdict {
    let mut rng = rng(401);
    let (mut count, mut unit_length) = (0, 0);
    let (mut worst_residual, mut worst_condition, mut worst_lambda) = (0.0f64, 0.0f64, 0.0f64);
    while count < 50 {
        let alpha1 = rng.random_range(-PI..PI);
        let gamma1 = if rng.random::<bool>() { FRAC_PI_3 } else { -FRAC_PI_3 };
        let beta = rng.random_range(0.2..PI - 0.2);
        let length = if count % 2 == 0 { 1.0 } else { rng.random_range(0.3..3.0) };
        let variant = if rng.random::<bool>() { FamilyVariant::First } else { FamilyVariant::Second };
        let positive = rng.random::<bool>();
        // Keep clear of the family's own singularity sin(α₁ + β − γ₁) = 0.
        if (alpha1 + beta - gamma1).sin().abs() < 0.05 {
            continue;
        }
        let c = closed_form_family(alpha1, gamma1, beta, length, variant, positive).map_err(|e| e.to_string())?;
        let residual = isotropy_residuals(&c).map_err(|e| e.to_string())?.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        let check = is_isotropic(&c, 1e-9).map_err(|e| e.to_string())?;
        ensure(residual <= 1e-10, || format!("sample {count}: residual {residual:.3e}"))?;
        ensure((check.condition - 1.0).abs() <= 1e-8, || format!("sample {count}: condition {}", check.condition))?;
        worst_residual = worst_residual.max(residual);
        worst_condition = worst_condition.max((check.condition - 1.0).abs());
        if length == 1.0 {
            let err = (check.lambda - beta.sin() * (2.0f64 / 3.0).sqrt()).abs();
            ensure(err <= 1e-9, || format!("sample {count}: lambda off by {err:.3e}"))?;
            worst_lambda = worst_lambda.max(err);
            unit_length += 1;
        }
        count += 1;
    }
    Ok(format!(
        "50 members: max residual {worst_residual:.1e}, |cond - 1| <= {worst_condition:.1e}, \
         lambda error <= {worst_lambda:.1e} on {unit_length} unit-length members"
    ))
}

fn random_config(rng: &mut ChaCha8Rng) -> TripodConfig {
    let mut leg = || TripodLeg {
        r_o: rng.random_range(0.5..1.5),
        gamma: rng.random_range(-PI..PI),
        alpha: rng.random_range(-PI..PI),
        a: rng.random_range(-1.0..1.0),
        q: rng.random_range(0.3..1.5) * if rng.random::<bool>() { 1.0 } else { -1.0 },
    };
    let legs = [leg(), leg(), leg()];
    TripodConfig {
        legs,
        theta: rng.random_range(-PI..PI),
        length: rng.random_range(0.5..2.0),
        xi: rng.random_range(-1.0..1.0),
        eta: rng.random_range(-1.0..1.0),
    }
}

/// Random configurations whose `A` is comfortably invertible.
fn non_singular(seed: u64, count: usize) -> Vec<TripodConfig> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c = random_config(&mut rng);
        let sv = matrix_a(&c).singular_values();
        if sv.min() > 1e-3 * sv.max() {
            out.push(c);
        }
    }
    out
}

pub fn jacobians() -> Verdict {
    let mut worst_product = 0.0f64;
    for (k, c) in non_singular(501, 100).iter().enumerate() {
        let jq = jacobian_via_ab(c).map_err(|e| e.to_string())?;
        let inv = inverse_jacobian(c).map_err(|e| e.to_string())?;
        let err = (jq * inv - Matrix3::identity()).amax();
        ensure(err <= 1e-9, || format!("config {k}: product off identity by {err:.3e}"))?;
        worst_product = worst_product.max(err);
    }
    let h = 1e-6;
    let mut worst_fd = 0.0f64;
    for (k, c) in non_singular(502, 20).iter().enumerate() {
        let feet = c.feet();
        let jq = jacobian_via_ab(c).map_err(|e| e.to_string())?;
        let q0 = [c.legs[0].q, c.legs[1].q, c.legs[2].q];
        for i in 0..3 {
            let (mut plus, mut minus) = (q0, q0);
            plus[i] += h;
            minus[i] -= h;
            let (p, _) = forward_kinematics(&feet, c, plus).map_err(|e| e.to_string())?;
            let (m, _) = forward_kinematics(&feet, c, minus).map_err(|e| e.to_string())?;
            let column = (p.body_coordinates() - m.body_coordinates()) / (2.0 * h);
            let expected = jq.column(i).into_owned();
            let rel = (column - expected).norm() / expected.norm();
            ensure(rel <= 1e-5, || format!("config {k}, column {i}: relative error {rel:.3e}"))?;
            worst_fd = worst_fd.max(rel);
        }
    }
    Ok(format!(
        "product error <= {worst_product:.1e} on 100 configs; finite differences within {worst_fd:.1e} relative on 20"
    ))
}
