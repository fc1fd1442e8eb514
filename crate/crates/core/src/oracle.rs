//! Brute-force optima over every feasible coloring.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{bottleneck_perfect_matching, exact_min_weight_perfect_matching, exact_tsp, minimum_spanning_tree};
use crate::instance::{Coloring, Distance, PairInstance, PointId};
use crate::problem::{Objective, ProblemSpec, Structure};

/// Largest side handled by [`exact_side_value`] per structure.
pub const MST_SIDE_LIMIT: usize = 20;
pub const MATCHING_SIDE_LIMIT: usize = 12;
pub const TSP_SIDE_LIMIT: usize = 13;

/// Largest pair count handled by [`exact_optimum`] per structure.
pub fn pair_limit(structure: Structure) -> usize {
    match structure {
        Structure::Mst => 10,
        Structure::Matching => 6,
        Structure::Tsp => 6,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: f64,
    pub argmin: Coloring,
    pub explored_count: usize,
}

/// All `2^(n-1)` feasible colorings with the first point of pair 0 red.
pub fn feasible_colorings(inst: &PairInstance) -> impl Iterator<Item = Coloring> + '_ {
    let n = inst.pair_count();
    (0..1usize << (n - 1)).map(move |mask| coloring_for_mask(inst, mask))
}

fn coloring_for_mask(inst: &PairInstance, mask: usize) -> Coloring {
    let n = inst.pair_count();
    let choices: Vec<bool> = (0..n).map(|i| i == 0 || mask >> (i - 1) & 1 == 0).collect();
    Coloring::from_choices(inst, &choices)
}

fn capacity(what: &'static str, size: usize, limit: usize) -> Result<()> {
    if size > limit {
        Err(Error::Capacity { what, size, limit })
    } else {
        Ok(())
    }
}

/// Minimum possible longest edge of a Hamiltonian cycle through `points`.
fn bottleneck_tour_value<D: Distance + ?Sized>(points: &[PointId], metric: &D) -> f64 {
    let m = points.len();
    if m <= 1 {
        return 0.0;
    }
    let d: Vec<Vec<f64>> = points.iter().map(|&a| points.iter().map(|&b| metric.dist(a, b)).collect()).collect();
    if m <= 3 {
        // Only one cycle exists.
        return (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).map(|(i, j)| d[i][j]).fold(0.0, f64::max);
    }
    let mut weights: Vec<f64> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).map(|(i, j)| d[i][j]).collect();
    weights.sort_by(f64::total_cmp);
    weights.dedup();
    let (mut lo, mut hi) = (0, weights.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if hamiltonian_cycle_exists(&d, weights[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    weights[lo]
}

/// Bitmask reachability of Hamiltonian paths from node 0 closing back to 0.
fn hamiltonian_cycle_exists(d: &[Vec<f64>], threshold: f64) -> bool {
    let m = d.len();
    let adj: Vec<usize> =
        (0..m).map(|i| (0..m).filter(|&j| j != i && d[i][j] <= threshold).fold(0, |acc, j| acc | 1 << j)).collect();
    // reach[mask] is the set of end nodes of paths from 0 covering `mask`.
    let mut reach = vec![0usize; 1 << m];
    reach[1] = 1;
    for mask in 1..1usize << m {
        if mask & 1 == 0 || reach[mask] == 0 {
            continue;
        }
        let mut ends = reach[mask];
        while ends != 0 {
            let v = ends.trailing_zeros() as usize;
            ends &= ends - 1;
            let mut next = adj[v] & !mask;
            while next != 0 {
                let w = next.trailing_zeros() as usize;
                next &= next - 1;
                reach[mask | 1 << w] |= 1 << w;
            }
        }
    }
    reach[(1 << m) - 1] & adj[0] != 0
}

/// Exact value of one side's structure; bottleneck asks for the minimum
/// possible longest edge, the other objectives for the minimum cost.
pub fn exact_side_value(points: &[PointId], inst: &PairInstance, spec: ProblemSpec) -> Result<f64> {
    let neck = spec.objective == Objective::Bottleneck;
    match spec.structure {
        Structure::Mst => {
            capacity("exact tree side", points.len(), MST_SIDE_LIMIT)?;
            let t = minimum_spanning_tree(points, inst)?;
            Ok(if neck { t.max_edge() } else { t.cost() })
        }
        Structure::Matching => {
            capacity("exact matching side", points.len(), MATCHING_SIDE_LIMIT)?;
            if points.len() % 2 == 1 {
                return Err(Error::infeasible(format!("a side of {} points has no perfect matching", points.len())));
            }
            Ok(if neck {
                bottleneck_perfect_matching(points, inst, &[])?.bottleneck()
            } else {
                exact_min_weight_perfect_matching(points, inst, &[])?.cost()
            })
        }
        Structure::Tsp => {
            capacity("exact tour side", points.len(), TSP_SIDE_LIMIT)?;
            Ok(if neck { bottleneck_tour_value(points, inst) } else { exact_tsp(points, inst)?.cost() })
        }
    }
}

fn coloring_value(inst: &PairInstance, c: &Coloring, spec: ProblemSpec) -> Result<f64> {
    let r = exact_side_value(c.red(), inst, spec)?;
    let b = exact_side_value(c.blue(), inst, spec)?;
    Ok(match spec.objective {
        Objective::Sum => r + b,
        Objective::Max | Objective::Bottleneck => r.max(b),
    })
}

/// Optimum over all feasible colorings; ties go to the smaller coloring.
pub fn exact_optimum(inst: &PairInstance, spec: ProblemSpec) -> Result<OracleResult> {
    let n = inst.pair_count();
    capacity("exact optimum pair count", n, pair_limit(spec.structure))?;
    if spec.structure == Structure::Matching && n % 2 == 1 {
        return Err(Error::infeasible(format!("2-matching requires even n, got {n}")));
    }
    let count = 1usize << (n - 1);
    let (value, argmin) = (0..count)
        .into_par_iter()
        .map(|mask| {
            let c = coloring_for_mask(inst, mask);
            coloring_value(inst, &c, spec).map(|v| (v, c))
        })
        .try_reduce_with(|a, b| Ok(if b.0.total_cmp(&a.0).then_with(|| b.1.cmp(&a.1)).is_lt() { b } else { a }))
        .expect("at least one coloring")?;
    Ok(OracleResult { value, argmin, explored_count: count })
}
