//! Exact two-objective hypervolume.

use log::debug;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hypervolume {
    pub area: f64,
    /// Points that do not dominate the reference point and were ignored.
    pub excluded: usize,
}

impl Hypervolume {
    /// Area divided by the area of the box spanned by `ideal` and `reference`.
    pub fn normalized(&self, ideal: [f64; 2], reference: [f64; 2]) -> f64 {
        let box_area = (reference[0] - ideal[0]) * (reference[1] - ideal[1]);
        if box_area > 0.0 {
            self.area / box_area
        } else {
            0.0
        }
    }
}

/// Area dominated by `points` and bounded by `reference`, by a sweep over the
/// first objective.
pub fn hypervolume_2d(points: &[[f64; 2]], reference: [f64; 2]) -> Hypervolume {
    let mut inside: Vec<[f64; 2]> = Vec::with_capacity(points.len());
    let mut excluded = 0;
    for p in points {
        if p[0] <= reference[0] && p[1] <= reference[1] {
            inside.push(*p);
        } else {
            excluded += 1;
        }
    }
    if excluded > 0 {
        debug!("hypervolume: {excluded} point(s) do not dominate the reference point");
    }
    inside.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut area = 0.0;
    let mut ceiling = reference[1];
    for p in inside {
        if p[1] < ceiling {
            area += (reference[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    Hypervolume { area, excluded }
}

/// Area dominated by `point` and bounded by `reference` that no member of
/// `front` already dominates. `front` must be sorted as [`nondominated_2d`]
/// returns it. Every summand is non-negative, so repeated insertion gives a
/// running total that cannot decrease.
pub fn exclusive_contribution(point: [f64; 2], front: &[[f64; 2]], reference: [f64; 2]) -> f64 {
    if !(point[0] < reference[0] && point[1] < reference[1]) {
        return 0.0;
    }
    let mut ceiling = reference[1];
    let mut x = point[0];
    let mut area = 0.0;
    for q in front {
        if q[0] <= point[0] {
            ceiling = ceiling.min(q[1]);
            continue;
        }
        if q[0] >= reference[0] || ceiling <= point[1] {
            break;
        }
        area += (q[0] - x) * (ceiling - point[1]).max(0.0);
        x = q[0];
        ceiling = ceiling.min(q[1]);
    }
    area + (reference[0] - x) * (ceiling - point[1]).max(0.0)
}

/// Nondominated subset of `points`, sorted by the first objective, with
/// duplicates removed.
pub fn nondominated_2d(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut sorted: Vec<[f64; 2]> =
        points.iter().copied().filter(|p| p[0].is_finite() && p[1].is_finite()).collect();
    sorted.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut front: Vec<[f64; 2]> = Vec::new();
    for p in sorted {
        if front.last().is_none_or(|last| p[1] < last[1]) {
            front.push(p);
        }
    }
    front
}
