#![allow(dead_code)]

use std::f64::consts::PI;

use legkit_core::fourbar::{self, Branch, CrankSchedule, FourBarParams, Pose};
use legkit_core::search::ParamBox;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lambda-linkage proportions: a crank-rocker whose coupler point traces a
/// nearly straight line over about half a crank turn.
pub fn lambda_params(arc: f64) -> FourBarParams {
    FourBarParams {
        crank: 0.5,
        coupler: 1.25,
        rocker: 1.25,
        start_angle: PI / 2.0,
        support_arc: arc,
        branch: Branch::Positive,
    }
}

pub fn random_genome(rng: &mut impl Rng, bounds: &ParamBox) -> [f64; 5] {
    std::array::from_fn(|i| bounds.lower[i] + (bounds.upper[i] - bounds.lower[i]) * rng.random::<f64>())
}

/// `count` valid sweeps drawn from random genomes of the default box.
pub fn random_sweeps(seed: u64, count: usize, samples: usize) -> Vec<(FourBarParams, CrankSchedule, Vec<Pose>)> {
    let mut rng = rng(seed);
    let bounds = ParamBox::default();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = random_genome(&mut rng, &bounds);
        let branch = if rng.random::<bool>() { Branch::Positive } else { Branch::Negative };
        let Ok(params) = FourBarParams::from_genome(&g, branch) else { continue };
        let Ok(schedule) = params.schedule(samples) else { continue };
        if let Ok(poses) = fourbar::sweep_schedule(&params, &schedule, fourbar::DEFAULT_CONTINUITY_BOUND) {
            out.push((params, schedule, poses));
        }
    }
    out
}
