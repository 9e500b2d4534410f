//! Distances and dominance counts between two 2-D fronts.

use serde::Serialize;

use crate::dominance::dominates;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrontComparison {
    pub a_len: usize,
    pub b_len: usize,
    /// Mean distance from each point of `a` to its nearest point of `b`.
    pub distance_a_to_b: f64,
    /// Mean distance from each point of `b` to its nearest point of `a`.
    pub distance_b_to_a: f64,
    /// Points of `a` dominated by at least one point of `b`.
    pub a_dominated_by_b: usize,
    /// Points of `b` dominated by at least one point of `a`.
    pub b_dominated_by_a: usize,
}

fn mean_nearest(from: &[[f64; 2]], to: &[[f64; 2]]) -> f64 {
    if from.is_empty() || to.is_empty() {
        return f64::NAN;
    }
    let total: f64 = from
        .iter()
        .map(|p| {
            to.iter().map(|q| (p[0] - q[0]).hypot(p[1] - q[1])).fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / from.len() as f64
}

fn dominated_count(points: &[[f64; 2]], by: &[[f64; 2]]) -> usize {
    points.iter().filter(|p| by.iter().any(|q| dominates(q, *p))).count()
}

pub fn compare_fronts(a: &[[f64; 2]], b: &[[f64; 2]]) -> FrontComparison {
    FrontComparison {
        a_len: a.len(),
        b_len: b.len(),
        distance_a_to_b: mean_nearest(a, b),
        distance_b_to_a: mean_nearest(b, a),
        a_dominated_by_b: dominated_count(a, b),
        b_dominated_by_a: dominated_count(b, a),
    }
}
