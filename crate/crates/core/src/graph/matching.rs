//! Perfect matchings on general graphs.
//!
//! Minimum-weight matching uses a subset dynamic program: repeatedly match
//! the lowest unmatched node, which enumerates every perfect matching exactly
//! once in `O(2^m · m)`. Feasibility tests for the bottleneck search use
//! Edmonds' blossom algorithm for maximum cardinality, which has no size cap.

use std::collections::{HashSet, VecDeque};

use super::{Edge, Matching};
use crate::error::{Error, Result};
use crate::instance::{Distance, PointId};

/// Largest node count accepted by the subset dynamic program.
pub const DP_MATCHING_LIMIT: usize = 20;

const NONE: usize = usize::MAX;

/// Dense weight table over sorted nodes; forbidden slots hold `+∞`.
struct WeightTable {
    nodes: Vec<PointId>,
    w: Vec<f64>,
}

impl WeightTable {
    fn build<D: Distance + ?Sized>(nodes: &[PointId], metric: &D, forbidden: &[(PointId, PointId)]) -> Self {
        let mut nodes = nodes.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        let m = nodes.len();
        let banned: HashSet<(PointId, PointId)> =
            forbidden.iter().map(|&(a, b)| if a < b { (a, b) } else { (b, a) }).collect();
        let mut w = vec![f64::INFINITY; m * m];
        for i in 0..m {
            for j in i + 1..m {
                if !banned.contains(&(nodes[i], nodes[j])) {
                    let d = metric.dist(nodes[i], nodes[j]);
                    w[i * m + j] = d;
                    w[j * m + i] = d;
                }
            }
        }
        WeightTable { nodes, w }
    }

    #[inline]
    fn len(&self) -> usize {
        self.nodes.len()
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.w[i * self.len() + j]
    }

    fn restricted_to(&self, threshold: f64) -> WeightTable {
        WeightTable {
            nodes: self.nodes.clone(),
            w: self.w.iter().map(|&x| if x <= threshold { x } else { f64::INFINITY }).collect(),
        }
    }

    fn to_matching(&self, pairs: &[(usize, usize)]) -> Matching {
        Matching::new(pairs.iter().map(|&(i, j)| Edge::new(self.nodes[i], self.nodes[j], self.get(i, j))).collect())
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let m = self.len();
        (0..m).map(|i| (0..m).filter(|&j| j != i && self.get(i, j).is_finite()).collect()).collect()
    }
}

/// Optimal matching with the lexicographically smallest `(u, v)`-sorted
/// edge list among ties, or `None` if no perfect matching exists.
fn dp_min_matching(table: &WeightTable) -> Option<Vec<(usize, usize)>> {
    let m = table.len();
    debug_assert!(m <= DP_MATCHING_LIMIT && m.is_multiple_of(2));
    if m == 0 {
        return Some(Vec::new());
    }
    let full: usize = (1 << m) - 1;
    // best[mask]: cheapest way to match the nodes outside `mask`.
    let mut best = vec![f64::INFINITY; 1 << m];
    let mut choice = vec![u8::MAX; 1 << m];
    best[full] = 0.0;
    for mask in (0..full).rev() {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        let i = mask.trailing_ones() as usize;
        let with_i = mask | (1 << i);
        for j in i + 1..m {
            if with_i & (1 << j) != 0 {
                continue;
            }
            let w = table.get(i, j);
            if !w.is_finite() {
                continue;
            }
            let rest = best[with_i | (1 << j)];
            let c = w + rest;
            // Strict comparison keeps the smallest partner on ties.
            if c < best[mask] {
                best[mask] = c;
                choice[mask] = j as u8;
            }
        }
    }
    if !best[0].is_finite() {
        return None;
    }
    let mut pairs = Vec::with_capacity(m / 2);
    let mut mask = 0usize;
    while mask != full {
        let i = mask.trailing_ones() as usize;
        let j = choice[mask] as usize;
        pairs.push((i, j));
        mask |= (1 << i) | (1 << j);
    }
    Some(pairs)
}

fn check_even(m: usize) -> Result<()> {
    if m % 2 == 1 {
        return Err(Error::usage(format!("perfect matching needs an even node count, got {m}")));
    }
    Ok(())
}

/// Exact minimum-weight perfect matching avoiding `forbidden` pairs.
///
/// Ties resolve to the lexicographically smallest sorted edge list.
pub fn exact_min_weight_perfect_matching<D: Distance + ?Sized>(
    nodes: &[PointId],
    metric: &D,
    forbidden: &[(PointId, PointId)],
) -> Result<Matching> {
    let table = WeightTable::build(nodes, metric, forbidden);
    check_even(table.len())?;
    if table.len() > DP_MATCHING_LIMIT {
        return Err(Error::Capacity { what: "exact matching node set", size: table.len(), limit: DP_MATCHING_LIMIT });
    }
    dp_min_matching(&table)
        .map(|pairs| table.to_matching(&pairs))
        .ok_or_else(|| Error::infeasible("no perfect matching avoids the forbidden pairs"))
}

/// Perfect matching minimizing the heaviest edge.
///
/// Binary search over the distinct allowed weights with a blossom
/// matchability test. Up to [`DP_MATCHING_LIMIT`] nodes the witness is the
/// minimum-weight matching inside the optimal threshold graph; above that it
/// is the blossom matching itself.
pub fn bottleneck_perfect_matching<D: Distance + ?Sized>(
    nodes: &[PointId],
    metric: &D,
    forbidden: &[(PointId, PointId)],
) -> Result<Matching> {
    let table = WeightTable::build(nodes, metric, forbidden);
    let m = table.len();
    check_even(m)?;
    if m == 0 {
        return Ok(Matching::default());
    }
    let mut weights: Vec<f64> = table.w.iter().copied().filter(|w| w.is_finite()).collect();
    weights.sort_by(f64::total_cmp);
    weights.dedup();

    let matchable = |t: f64| -> Option<Vec<usize>> {
        let mate = max_cardinality_matching(&table.restricted_to(t).adjacency());
        mate.iter().all(|&x| x != NONE).then_some(mate)
    };

    let Some(top) = weights.last().copied() else {
        return Err(Error::infeasible("no allowed edges"));
    };
    if matchable(top).is_none() {
        return Err(Error::infeasible("no perfect matching avoids the forbidden pairs"));
    }
    let (mut lo, mut hi) = (0usize, weights.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if matchable(weights[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let threshold = weights[lo];
    let restricted = table.restricted_to(threshold);
    let pairs = if m <= DP_MATCHING_LIMIT {
        dp_min_matching(&restricted).ok_or_else(|| Error::internal("threshold graph lost its matching"))?
    } else {
        let mate = matchable(threshold).ok_or_else(|| Error::internal("threshold graph lost its matching"))?;
        (0..m).filter(|&i| i < mate[i]).map(|i| (i, mate[i])).collect()
    };
    Ok(restricted.to_matching(&pairs))
}

/// Maximum cardinality matching on a general graph (Edmonds' blossom
/// shrinking). Returns `mate[v]`, `usize::MAX` when unmatched.
pub fn max_cardinality_matching(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let mut mate = vec![NONE; n];
    let mut search = BlossomSearch::new(n);
    for root in 0..n {
        if mate[root] != NONE {
            continue;
        }
        if let Some(mut v) = search.augmenting_path(adj, &mate, root) {
            while v != NONE {
                let pv = search.parent[v];
                let next = mate[pv];
                mate[v] = pv;
                mate[pv] = v;
                v = next;
            }
        }
    }
    mate
}

struct BlossomSearch {
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl BlossomSearch {
    fn new(n: usize) -> Self {
        BlossomSearch {
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn lowest_common_base(&self, mate: &[usize], mut a: usize, mut b: usize) -> usize {
        let mut seen = vec![false; mate.len()];
        loop {
            a = self.base[a];
            seen[a] = true;
            if mate[a] == NONE {
                break;
            }
            a = self.parent[mate[a]];
        }
        loop {
            b = self.base[b];
            if seen[b] {
                return b;
            }
            b = self.parent[mate[b]];
        }
    }

    fn mark_path(&mut self, mate: &[usize], mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[mate[v]]] = true;
            self.parent[v] = child;
            child = mate[v];
            v = self.parent[mate[v]];
        }
    }

    /// Free endpoint of an augmenting path from `root`, if any.
    fn augmenting_path(&mut self, adj: &[Vec<usize>], mate: &[usize], root: usize) -> Option<usize> {
        let n = adj.len();
        self.used.iter_mut().for_each(|u| *u = false);
        self.parent.iter_mut().for_each(|p| *p = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.queue.clear();
        self.used[root] = true;
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for &to in &adj[v] {
                if self.base[v] == self.base[to] || mate[v] == to {
                    continue;
                }
                if to == root || (mate[to] != NONE && self.parent[mate[to]] != NONE) {
                    let cur = self.lowest_common_base(mate, v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(mate, v, cur, to);
                    self.mark_path(mate, to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if mate[to] == NONE {
                        return Some(to);
                    }
                    let next = mate[to];
                    self.used[next] = true;
                    self.queue.push_back(next);
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ids(n: usize) -> Vec<PointId> {
        (0..n).map(PointId).collect()
    }

    /// All perfect matchings on `0..m` by recursive pairing of the first node.
    fn enumerate(rest: &[usize], acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        let first = rest[0];
        for k in 1..rest.len() {
            let mut remaining = rest[1..].to_vec();
            let partner = remaining.remove(k - 1);
            acc.push((first, partner));
            enumerate(&remaining, acc, out);
            acc.pop();
        }
    }

    fn all_matchings(m: usize) -> Vec<Vec<(usize, usize)>> {
        let mut out = Vec::new();
        enumerate(&(0..m).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
        out
    }

    fn on_line(xs: &'static [f64]) -> impl Fn(PointId, PointId) -> f64 {
        move |a, b| (xs[a.0] - xs[b.0]).abs()
    }

    fn edge_list(m: &Matching) -> Vec<(usize, usize)> {
        m.edges().iter().map(|e| (e.u.0, e.v.0)).collect()
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(all_matchings(4).len(), 3);
        assert_eq!(all_matchings(6).len(), 15);
    }

    #[test]
    fn min_weight_small_examples() {
        let two = exact_min_weight_perfect_matching(&ids(2), &|_: PointId, _: PointId| 4.0, &[]).unwrap();
        assert_eq!(two.cost(), 4.0);

        let d = on_line(&[0.0, 1.0, 2.0, 3.0]);
        let all: Vec<f64> =
            all_matchings(4).iter().map(|mm| mm.iter().map(|&(i, j)| d(PointId(i), PointId(j))).sum()).collect();
        assert_eq!(all.iter().copied().fold(f64::INFINITY, f64::min), 2.0);
        let m = exact_min_weight_perfect_matching(&ids(4), &d, &[]).unwrap();
        assert_eq!((edge_list(&m), m.cost()), (vec![(0, 1), (2, 3)], 2.0));

        let m = exact_min_weight_perfect_matching(&ids(4), &d, &[(PointId(0), PointId(1))]).unwrap();
        assert_eq!((edge_list(&m), m.cost()), (vec![(0, 2), (1, 3)], 4.0));
    }

    #[test]
    fn min_weight_errors() {
        let d = on_line(&[0.0, 1.0, 2.0]);
        assert!(matches!(exact_min_weight_perfect_matching(&ids(3), &d, &[]), Err(Error::Usage(_))));
        let d = on_line(&[0.0, 1.0]);
        let banned = [(PointId(1), PointId(0))];
        assert!(matches!(exact_min_weight_perfect_matching(&ids(2), &d, &banned), Err(Error::Infeasible(_))));
        let big = ids(DP_MATCHING_LIMIT + 2);
        assert!(matches!(
            exact_min_weight_perfect_matching(&big, &|_: PointId, _: PointId| 1.0, &[]),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn bottleneck_small_examples() {
        let d = on_line(&[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(bottleneck_perfect_matching(&ids(4), &d, &[]).unwrap().bottleneck(), 1.0);
        assert_eq!(bottleneck_perfect_matching(&ids(2), &d, &[]).unwrap().bottleneck(), 1.0);
        let banned = [(PointId(0), PointId(1)), (PointId(2), PointId(3))];
        let m = bottleneck_perfect_matching(&ids(4), &d, &banned).unwrap();
        assert_eq!(m.bottleneck(), 2.0);
        assert_eq!(edge_list(&m), vec![(0, 2), (1, 3)]);
    }

    #[test]
    fn dp_and_bottleneck_agree_with_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let m = 2 * rng.gen_range(1..=4);
            let w: Vec<Vec<f64>> = (0..m).map(|_| (0..m).map(|_| rng.gen_range(0..20) as f64).collect()).collect();
            let weight = |a: PointId, b: PointId| {
                let (i, j) = if a < b { (a.0, b.0) } else { (b.0, a.0) };
                w[i][j]
            };
            let forbidden: Vec<(PointId, PointId)> = (0..m)
                .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
                .filter(|_| rng.gen_bool(0.25))
                .map(|(i, j)| (PointId(i), PointId(j)))
                .collect();
            let banned: HashSet<(usize, usize)> = forbidden.iter().map(|&(a, b)| (a.0, b.0)).collect();
            let feasible: Vec<Vec<(usize, usize)>> =
                all_matchings(m).into_iter().filter(|mm| mm.iter().all(|e| !banned.contains(e))).collect();
            let sum = exact_min_weight_perfect_matching(&ids(m), &weight, &forbidden);
            let neck = bottleneck_perfect_matching(&ids(m), &weight, &forbidden);
            if feasible.is_empty() {
                assert!(matches!(sum, Err(Error::Infeasible(_))));
                assert!(matches!(neck, Err(Error::Infeasible(_))));
                continue;
            }
            let cost = |mm: &Vec<(usize, usize)>| mm.iter().map(|&(i, j)| w[i][j]).sum::<f64>();
            let worst = |mm: &Vec<(usize, usize)>| mm.iter().map(|&(i, j)| w[i][j]).fold(0.0, f64::max);
            let best_sum = feasible.iter().map(cost).fold(f64::INFINITY, f64::min);
            let best_neck = feasible.iter().map(worst).fold(f64::INFINITY, f64::min);
            let lex_first = feasible.iter().filter(|mm| cost(mm) == best_sum).min().unwrap();
            let sum = sum.unwrap();
            assert_eq!(sum.cost(), best_sum);
            assert_eq!(&edge_list(&sum), lex_first);
            let neck = neck.unwrap();
            assert_eq!(neck.bottleneck(), best_neck);
            assert!(neck.is_perfect_on(&ids(m)));
        }
    }

    #[test]
    fn blossom_cardinality_matches_dp_feasibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let n = rng.gen_range(1..=12);
            let p = rng.gen_range(0.1..0.7);
            let mut adj = vec![Vec::new(); n];
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(p) {
                        adj[i].push(j);
                        adj[j].push(i);
                    }
                }
            }
            let mate = max_cardinality_matching(&adj);
            for (v, &u) in mate.iter().enumerate() {
                if u != NONE {
                    assert_eq!(mate[u], v);
                    assert!(adj[v].contains(&u));
                }
            }
            let size = mate.iter().filter(|&&u| u != NONE).count() / 2;
            // Maximum cardinality by brute force over edge subsets via DP on masks.
            let mut best = vec![0usize; 1 << n];
            for mask in 1usize..(1 << n) {
                let i = mask.trailing_zeros() as usize;
                let rest = mask & !(1 << i);
                let mut b = best[rest];
                for &j in &adj[i] {
                    if rest & (1 << j) != 0 {
                        b = b.max(1 + best[rest & !(1 << j)]);
                    }
                }
                best[mask] = b;
            }
            assert_eq!(size, best[(1 << n) - 1]);
        }
    }
}
