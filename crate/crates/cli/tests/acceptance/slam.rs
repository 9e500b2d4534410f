use legkit_slam::{simulate, SimConfig, World};

use crate::{ensure, Verdict};

pub fn behaviour() -> Verdict {
    let world = World::demo();
    let noise_free = SimConfig {
        initial_error: [0.15, -0.1, 0.05],
        initial_sigma: [0.2, 0.2, 0.1],
        prior_map: true,
        ..SimConfig::noise_free()
    };
    let log = simulate(&world, &noise_free, 0).map_err(|e| e.to_string())?;
    let converged = log.final_slam_error();
    ensure(converged <= 1e-6, || format!("noise-free final error {converged:.3e}"))?;

    let config = SimConfig::default();
    let mut wins = 0;
    let mut min_eigen = f64::INFINITY;
    for seed in 0..10 {
        let log = simulate(&world, &config, seed).map_err(|e| e.to_string())?;
        for s in &log.steps {
            ensure(s.min_eigenvalue >= -1e-12, || format!("seed {seed}, step {}: eigenvalue {}", s.step, s.min_eigenvalue))?;
            min_eigen = min_eigen.min(s.min_eigenvalue);
        }
        if log.slam_rmse() < log.dead_reckoning_rmse() {
            wins += 1;
        }
    }
    ensure(wins >= 9, || format!("SLAM beat dead reckoning in {wins} of 10 seeds"))?;
    Ok(format!(
        "noise-free error {converged:.1e}; SLAM beat dead reckoning in {wins}/10 seeds; \
         smallest covariance eigenvalue {min_eigen:.1e}"
    ))
}
