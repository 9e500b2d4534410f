//! Bounded simulated binary crossover and polynomial mutation.

use rand::Rng;

use super::{sort::crowded_order, Individual};

/// Binary tournament under the crowded comparison; ties go to the first pick.
pub fn tournament<'a, R: Rng>(population: &'a [Individual], rng: &mut R) -> &'a Individual {
    let a = &population[rng.random_range(0..population.len())];
    let b = &population[rng.random_range(0..population.len())];
    if crowded_order(b, a).is_lt() {
        b
    } else {
        a
    }
}

fn spread_factor(u: f64, beta: f64, eta: f64) -> f64 {
    let alpha = 2.0 - beta.powf(-(eta + 1.0));
    if u <= 1.0 / alpha {
        (u * alpha).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
    }
}

/// Simulated binary crossover with the bound-aware spread distribution.
#[allow(clippy::too_many_arguments)]
pub fn sbx<R: Rng>(
    first: &[f64],
    second: &[f64],
    lower: &[f64],
    upper: &[f64],
    probability: f64,
    eta: f64,
    rng: &mut R,
) -> (Vec<f64>, Vec<f64>) {
    let mut c1 = first.to_vec();
    let mut c2 = second.to_vec();
    if rng.random::<f64>() > probability {
        return (c1, c2);
    }
    for i in 0..first.len() {
        if rng.random::<f64>() > 0.5 || (first[i] - second[i]).abs() <= 1e-14 {
            continue;
        }
        let (y1, y2) = if first[i] < second[i] { (first[i], second[i]) } else { (second[i], first[i]) };
        let (lo, hi) = (lower[i], upper[i]);
        let u = rng.random::<f64>();
        let beta_low = 1.0 + 2.0 * (y1 - lo) / (y2 - y1);
        let mut a = 0.5 * ((y1 + y2) - spread_factor(u, beta_low, eta) * (y2 - y1));
        let beta_high = 1.0 + 2.0 * (hi - y2) / (y2 - y1);
        let mut b = 0.5 * ((y1 + y2) + spread_factor(u, beta_high, eta) * (y2 - y1));
        a = a.clamp(lo, hi);
        b = b.clamp(lo, hi);
        if rng.random::<f64>() <= 0.5 {
            std::mem::swap(&mut a, &mut b);
        }
        c1[i] = a;
        c2[i] = b;
    }
    (c1, c2)
}

/// Polynomial mutation, each variable mutated with `probability`.
pub fn polynomial_mutation<R: Rng>(
    genome: &mut [f64],
    lower: &[f64],
    upper: &[f64],
    probability: f64,
    eta: f64,
    rng: &mut R,
) {
    let power = 1.0 / (eta + 1.0);
    for i in 0..genome.len() {
        if rng.random::<f64>() > probability {
            continue;
        }
        let (lo, hi) = (lower[i], upper[i]);
        let span = hi - lo;
        if span <= 0.0 {
            genome[i] = lo;
            continue;
        }
        let y = genome[i];
        let u = rng.random::<f64>();
        let shift = if u <= 0.5 {
            let xy = 1.0 - (y - lo) / span;
            let val = 2.0 * u + (1.0 - 2.0 * u) * xy.powf(eta + 1.0);
            val.powf(power) - 1.0
        } else {
            let xy = 1.0 - (hi - y) / span;
            let val = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * xy.powf(eta + 1.0);
            1.0 - val.powf(power)
        };
        genome[i] = (y + shift * span).clamp(lo, hi);
    }
}
