use std::cmp::Ordering;

use super::Individual;
use crate::dominance::dominates;

/// Constraint-domination: feasible beats infeasible, lower violation beats
/// higher, and Pareto dominance decides between feasible individuals.
pub fn constrained_dominates(a: &Individual, b: &Individual) -> bool {
    match (a.is_feasible(), b.is_feasible()) {
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.violation < b.violation,
        (true, true) => dominates(&a.objectives, &b.objectives),
    }
}

/// Splits the population into fronts of mutually nondominated individuals.
/// Front 0 is the nondominated set; indices within a front are ascending.
pub fn fast_nondominated_sort(population: &[Individual]) -> Vec<Vec<usize>> {
    let n = population.len();
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut domination_count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if constrained_dominates(&population[i], &population[j]) {
                dominated_by[i].push(j);
                domination_count[j] += 1;
            } else if constrained_dominates(&population[j], &population[i]) {
                dominated_by[j].push(i);
                domination_count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| domination_count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                domination_count[j] -= 1;
                if domination_count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Crowding distance of each member of one front.
///
/// Boundary members of every objective get `+∞`; interior members accumulate
/// the neighbour gap divided by the objective's range. Objectives with a zero
/// or non-finite range contribute nothing beyond their boundaries.
pub fn crowding_distance<P: AsRef<[f64]>>(front: &[P]) -> Vec<f64> {
    let n = front.len();
    if n == 0 {
        return Vec::new();
    }
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].as_ref().len();
    let mut distance = vec![0.0; n];
    let mut order: Vec<usize> = (0..n).collect();
    for obj in 0..m {
        let value = |i: usize| front[i].as_ref()[obj];
        order.sort_by(|&a, &b| value(a).total_cmp(&value(b)).then(a.cmp(&b)));
        distance[order[0]] = f64::INFINITY;
        distance[order[n - 1]] = f64::INFINITY;
        let range = value(order[n - 1]) - value(order[0]);
        if !(range.is_finite() && range > 0.0) {
            continue;
        }
        for k in 1..n - 1 {
            distance[order[k]] += (value(order[k + 1]) - value(order[k - 1])) / range;
        }
    }
    distance
}

/// Crowded comparison: lower rank first, then larger crowding distance.
pub fn crowded_order(a: &Individual, b: &Individual) -> Ordering {
    a.rank.cmp(&b.rank).then_with(|| b.crowding.total_cmp(&a.crowding))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pop(objs: &[[f64; 2]]) -> Vec<Individual> {
        objs.iter().map(|o| Individual::evaluated(vec![], o.to_vec(), 0.0)).collect()
    }

    #[test]
    fn two_fronts() {
        assert_eq!(
            fast_nondominated_sort(&pop(&[[1.0, 2.0], [2.0, 1.0], [3.0, 3.0]])),
            vec![vec![0, 1], vec![2]]
        );
    }

    #[test]
    fn identical_objectives_share_a_front() {
        assert_eq!(fast_nondominated_sort(&pop(&[[1.0, 1.0]; 5])), vec![vec![0, 1, 2, 3, 4]]);
    }

    #[test]
    fn chain_gives_singletons() {
        assert_eq!(
            fast_nondominated_sort(&pop(&[[3.0, 3.0], [1.0, 1.0], [2.0, 2.0]])),
            vec![vec![1], vec![2], vec![0]]
        );
    }

    #[test]
    fn feasibility_comes_first() {
        let mut p = pop(&[[0.0, 0.0], [5.0, 5.0], [0.0, 0.0]]);
        p[0].violation = 2.0;
        p[2].violation = 1.0;
        assert_eq!(fast_nondominated_sort(&p), vec![vec![1], vec![2], vec![0]]);
    }

    #[test]
    fn crowding_small_fronts_are_boundaries() {
        assert_eq!(crowding_distance(&[[0.0, 1.0], [1.0, 0.0]]), vec![f64::INFINITY; 2]);
        let d = crowding_distance(&[[0.0, 2.0], [1.0, 1.0], [2.0, 0.0]]);
        assert_eq!(d[1], 2.0);
        assert!(d[0].is_infinite() && d[2].is_infinite());
    }
}
