use legkit_cli::commands::synth::{self, SynthConfig};
use legkit_cli::Output;
use legkit_core::fourbar::{self, step_cycle_ratio, Branch, CrankSchedule, FourBarParams, Pose};
use legkit_core::search::ParamBox;
use legkit_core::synthesis::{assemble, residual_delta, solve};
use nalgebra::{Matrix6, Vector6};
use rand::Rng;

use crate::{ensure, rng, Verdict};

pub fn step_cycle() -> Verdict {
    let (a, b) = (step_cycle_ratio(221.0), step_cycle_ratio(184.0));
    ensure((a - 1.59).abs() <= 0.005, || format!("nu(221) = {a}"))?;
    ensure((b - 1.045).abs() <= 0.005, || format!("nu(184) = {b}"))?;
    Ok(format!("nu(221 deg) = {a:.4}, nu(184 deg) = {b:.4}"))
}

pub fn hybrid_synthesis() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = Output::create(dir.path(), "synth", "acceptance".into()).map_err(|e| e.to_string())?;
    let config = SynthConfig::default();
    ensure(config.budget == 1 << 14, || format!("default budget {}", config.budget))?;
    ensure(config.bounds == ParamBox::default(), || "non-default box".into())?;
    let summary = synth::run(&config, &out).map_err(|e| e.to_string())?;
    let best = summary.best.ok_or("no design meets the requirements")?;
    let detail = format!(
        "mu_min {:.2} deg, nu {:.4}, support arc {:.2} deg, normalized RMS {:.2e}",
        best.mu_min_deg, best.nu, best.support_arc_deg, best.normalized_rms
    );
    let ok = best.mu_min_deg >= 24.0
        && best.nu >= 1.55
        && best.support_arc_deg >= 215.0
        && best.normalized_rms <= 5e-3;
    ensure(ok, || detail.clone())?;
    Ok(detail)
}

fn random_sweeps(seed: u64, count: usize, samples: usize) -> Vec<(CrankSchedule, Vec<Pose>)> {
    let mut rng = rng(seed);
    let bounds = ParamBox::default();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g: [f64; 5] =
            std::array::from_fn(|i| bounds.lower[i] + (bounds.upper[i] - bounds.lower[i]) * rng.random::<f64>());
        let branch = if rng.random::<bool>() { Branch::Positive } else { Branch::Negative };
        let Ok(params) = FourBarParams::from_genome(&g, branch) else { continue };
        let Ok(schedule) = params.schedule(samples) else { continue };
        if let Ok(poses) = fourbar::sweep_schedule(&params, &schedule, fourbar::DEFAULT_CONTINUITY_BOUND) {
            out.push((schedule, poses));
        }
    }
    out
}

/// Normal equations recovered from the residual alone by central
/// differences with unit steps; exact up to rounding since δ is quadratic.
fn normal_equations_by_differences(poses: &[Pose], schedule: &CrankSchedule) -> (Matrix6<f64>, Vector6<f64>) {
    let unit = |i: usize| Vector6::from_fn(|r, _| if r == i { 1.0 } else { 0.0 });
    let d = |x: Vector6<f64>| residual_delta(poses, schedule, &x).unwrap();
    let mut a = Matrix6::zeros();
    let mut b = Vector6::zeros();
    for i in 0..6 {
        b[i] = -(d(unit(i)) - d(-unit(i))) / 4.0;
        for j in 0..6 {
            let (ei, ej) = (unit(i), unit(j));
            a[(i, j)] = (d(ei + ej) - d(ei - ej) - d(-ei + ej) + d(-ei - ej)) / 8.0;
        }
    }
    (a, b)
}

pub fn stationarity() -> Verdict {
    let h = 1e-4;
    let mut worst_grad = 0.0f64;
    for (k, (schedule, poses)) in random_sweeps(601, 100, 32).iter().enumerate() {
        let sol = solve(&assemble(poses, schedule).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let mut grad = 0.0f64;
        for j in 0..6 {
            let mut e = Vector6::zeros();
            e[j] = h;
            let plus = residual_delta(poses, schedule, &(sol.x + e)).unwrap();
            let minus = residual_delta(poses, schedule, &(sol.x - e)).unwrap();
            grad = grad.max(((plus - minus) / (2.0 * h)).abs());
        }
        let ratio = grad / (1e-8 * (1.0 + sol.delta));
        ensure(ratio <= 1.0, || format!("sweep {k}: gradient {grad:.3e} at delta {:.3e}", sol.delta))?;
        worst_grad = worst_grad.max(grad);
    }
    let mut worst_block = 0.0f64;
    for (k, (schedule, poses)) in random_sweeps(602, 100, 24).iter().enumerate() {
        let system = assemble(poses, schedule).map_err(|e| e.to_string())?;
        let (a, b) = normal_equations_by_differences(poses, schedule);
        let err = (system.matrix - a).amax().max((system.rhs - b).amax());
        ensure(err <= 1e-10, || format!("sweep {k}: block mismatch {err:.3e}"))?;
        worst_block = worst_block.max(err);
    }
    Ok(format!("largest gradient {worst_grad:.1e} over 100 sweeps; worst block mismatch {worst_block:.1e}"))
}
