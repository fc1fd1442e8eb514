use super::{exact_min_weight_perfect_matching, minimum_spanning_tree, preorder_traversal, Tour};
use crate::error::{Error, Result};
use crate::instance::{Distance, PointId};

/// Default size limit for [`exact_tsp`].
pub const EXACT_TSP_LIMIT: usize = 13;

fn sorted_nodes(points: &[PointId]) -> Vec<PointId> {
    let mut nodes = points.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    nodes
}

/// Held-Karp with the default limit.
pub fn exact_tsp<D: Distance + ?Sized>(points: &[PointId], metric: &D) -> Result<Tour> {
    exact_tsp_with_limit(points, metric, EXACT_TSP_LIMIT)
}

/// Optimal tour by Held-Karp. Among optimal tours, returns the
/// lexicographically smallest order starting at the minimum id.
pub fn exact_tsp_with_limit<D: Distance + ?Sized>(points: &[PointId], metric: &D, limit: usize) -> Result<Tour> {
    let nodes = sorted_nodes(points);
    let m = nodes.len();
    if m > limit {
        return Err(Error::Capacity { what: "exact tour point set", size: m, limit });
    }
    if m <= 3 {
        return Ok(Tour::new(nodes, metric));
    }
    let d: Vec<Vec<f64>> = nodes.iter().map(|&a| nodes.iter().map(|&b| metric.dist(a, b)).collect()).collect();

    // Node k >= 1 owns bit k-1; node 0 is the fixed start.
    let bits = m - 1;
    let full = (1usize << bits) - 1;
    // rest[mask][k]: cheapest way to leave k, visit every node outside mask, return to 0.
    let mut rest = vec![f64::INFINITY; (full + 1) * m];
    for k in 1..m {
        rest[full * m + k] = d[k][0];
    }
    for mask in (1..full).rev() {
        for k in 1..m {
            if mask & (1 << (k - 1)) == 0 {
                continue;
            }
            let mut best = f64::INFINITY;
            for next in 1..m {
                let bit = 1 << (next - 1);
                if mask & bit == 0 {
                    best = best.min(d[k][next] + rest[(mask | bit) * m + next]);
                }
            }
            rest[mask * m + k] = best;
        }
    }

    let mut order = vec![nodes[0]];
    let (mut mask, mut at) = (0usize, 0usize);
    while mask != full {
        let mut pick = (f64::INFINITY, 0usize);
        for next in 1..m {
            let bit = 1 << (next - 1);
            if mask & bit == 0 {
                let c = d[at][next] + rest[(mask | bit) * m + next];
                if c < pick.0 {
                    pick = (c, next);
                }
            }
        }
        at = pick.1;
        mask |= 1 << (at - 1);
        order.push(nodes[at]);
    }
    Ok(Tour::new(order, metric))
}

/// Christofides: MST, exact matching on odd-degree nodes, Euler circuit from
/// the minimum id with ascending neighbours, first-occurrence shortcut.
///
/// The matching step is exact, so the odd-degree set must fit the matching
/// limit; beyond that a capacity error is returned.
pub fn christofides_tour<D: Distance + ?Sized>(points: &[PointId], metric: &D) -> Result<Tour> {
    let nodes = sorted_nodes(points);
    if nodes.len() <= 3 {
        return Ok(Tour::new(nodes, metric));
    }
    let tree = minimum_spanning_tree(&nodes, metric)?;
    let index_of = |p: PointId| nodes.binary_search(&p).expect("tree node");
    let m = nodes.len();
    let mut degree = vec![0usize; m];
    let mut multi: Vec<(usize, usize)> = Vec::new();
    for e in tree.edges() {
        let (a, b) = (index_of(e.u), index_of(e.v));
        degree[a] += 1;
        degree[b] += 1;
        multi.push((a, b));
    }
    let odd: Vec<PointId> = (0..m).filter(|&i| degree[i] % 2 == 1).map(|i| nodes[i]).collect();
    let matching = exact_min_weight_perfect_matching(&odd, metric, &[])?;
    for e in matching.edges() {
        multi.push((index_of(e.u), index_of(e.v)));
    }

    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
    for (id, &(a, b)) in multi.iter().enumerate() {
        incident[a].push((b, id));
        incident[b].push((a, id));
    }
    for list in &mut incident {
        list.sort_unstable();
    }
    let mut used = vec![false; multi.len()];
    let mut cursor = vec![0usize; m];
    let mut stack = vec![0usize];
    let mut circuit = Vec::with_capacity(multi.len() + 1);
    while let Some(&v) = stack.last() {
        while cursor[v] < incident[v].len() && used[incident[v][cursor[v]].1] {
            cursor[v] += 1;
        }
        if let Some(&(w, id)) = incident[v].get(cursor[v]) {
            used[id] = true;
            stack.push(w);
        } else {
            circuit.push(v);
            stack.pop();
        }
    }
    circuit.reverse();

    let mut seen = vec![false; m];
    let order: Vec<PointId> =
        circuit.into_iter().filter(|&i| !std::mem::replace(&mut seen[i], true)).map(|i| nodes[i]).collect();
    Ok(Tour::new(order, metric))
}

/// MST preorder from the minimum id; at most twice optimal in any
/// (pseudo)metric.
pub fn double_tree_tour<D: Distance + ?Sized>(points: &[PointId], metric: &D) -> Result<Tour> {
    let nodes = sorted_nodes(points);
    if nodes.len() <= 2 {
        return Ok(Tour::new(nodes, metric));
    }
    let tree = minimum_spanning_tree(&nodes, metric)?;
    Ok(Tour::new(preorder_traversal(&tree, nodes[0])?, metric))
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ids(n: usize) -> Vec<PointId> {
        (0..n).map(PointId).collect()
    }

    fn plane(pts: Vec<[f64; 2]>) -> impl Fn(PointId, PointId) -> f64 {
        move |a, b| f64::hypot(pts[a.0][0] - pts[b.0][0], pts[a.0][1] - pts[b.0][1])
    }

    /// Optimal cost over all tours fixing the first node.
    fn brute_force(m: usize, d: &dyn Fn(PointId, PointId) -> f64) -> f64 {
        (1..m)
            .permutations(m - 1)
            .map(|perm| {
                let order: Vec<PointId> = std::iter::once(0).chain(perm).map(PointId).collect();
                Tour::new(order, d).cost()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn exact_small_examples() {
        let ones = |a: PointId, b: PointId| if a == b { 0.0 } else { 1.0 };
        assert_eq!(exact_tsp(&ids(3), &ones).unwrap().cost(), 3.0);
        assert_eq!(exact_tsp(&ids(2), &ones).unwrap().cost(), 2.0);
        let square = plane(vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]]);
        let t = exact_tsp(&ids(4), &square).unwrap();
        assert_eq!(t.cost(), 4.0);
        assert_eq!(t.order(), &[PointId(0), PointId(2), PointId(1), PointId(3)]);
        assert!(matches!(exact_tsp(&ids(14), &ones), Err(Error::Capacity { .. })));
    }

    #[test]
    fn exact_matches_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..60 {
            let m = rng.gen_range(1..=8);
            let pts: Vec<[f64; 2]> = (0..m).map(|_| [rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)]).collect();
            let d = plane(pts);
            let ours = exact_tsp(&ids(m), &d).unwrap();
            let want = if m <= 1 { 0.0 } else { brute_force(m, &d) };
            assert!((ours.cost() - want).abs() <= 1e-9 * want.max(1.0));
        }
    }

    #[test]
    fn christofides_on_collinear_points() {
        let d = |a: PointId, b: PointId| (a.0 as f64 - b.0 as f64).abs();
        assert_eq!(christofides_tour(&ids(6), &d).unwrap().cost(), 10.0);
        assert_eq!(exact_tsp(&ids(6), &d).unwrap().cost(), 10.0);
        let three = christofides_tour(&ids(3), &d).unwrap();
        assert_eq!(three.cost(), exact_tsp(&ids(3), &d).unwrap().cost());
    }

    #[test]
    fn approximations_stay_within_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..40 {
            let m = rng.gen_range(1..=10);
            let pts: Vec<[f64; 2]> = (0..m).map(|_| [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]).collect();
            let d = plane(pts);
            let opt = exact_tsp(&ids(m), &d).unwrap().cost();
            let chris = christofides_tour(&ids(m), &d).unwrap();
            let dbl = double_tree_tour(&ids(m), &d).unwrap();
            assert_eq!(chris.len(), m);
            assert_eq!(chris.order().iter().copied().sorted().collect::<Vec<_>>(), ids(m));
            assert!(chris.cost() <= 1.5 * opt * (1.0 + 1e-9) + 1e-12);
            assert!(dbl.cost() <= 2.0 * opt * (1.0 + 1e-9) + 1e-12);
        }
    }
}
