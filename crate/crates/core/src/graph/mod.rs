//! Exact combinatorial kernels shared by the solvers: spanning trees,
//! perfect matchings, bipartite matching, tours and tree-cube cycles.

mod bipartite;
mod cube;
mod matching;
mod mst;
mod tsp;

pub use bipartite::{bipartite_perfect_matching, BipartiteOutcome};
pub use cube::{fold_path_to_cycle, tree_cube_hamiltonian_cycle, tree_hop_distances};
pub use matching::{
    bottleneck_perfect_matching, exact_min_weight_perfect_matching, max_cardinality_matching, DP_MATCHING_LIMIT,
};
pub use mst::{minimum_spanning_tree, preorder_traversal};
pub use tsp::{christofides_tour, double_tree_tour, exact_tsp, exact_tsp_with_limit, EXACT_TSP_LIMIT};

use serde::Serialize;

use crate::instance::{cmp_weighted, Distance, PointId};
use std::cmp::Ordering;

/// Undirected weighted edge with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Edge {
    pub u: PointId,
    pub v: PointId,
    pub w: f64,
}

impl Edge {
    pub fn new(a: PointId, b: PointId, w: f64) -> Self {
        debug_assert!(a != b, "self-loop at {a}");
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        Edge { u, v, w }
    }

    pub fn measured<D: Distance + ?Sized>(a: PointId, b: PointId, metric: &D) -> Self {
        Edge::new(a, b, metric.dist(a, b))
    }

    /// Ascending `(w, u, v)`.
    pub fn cmp_key(&self, other: &Edge) -> Ordering {
        cmp_weighted((self.w, self.u, self.v), (other.w, other.u, other.v))
    }

    pub fn touches(&self, p: PointId) -> bool {
        self.u == p || self.v == p
    }

    pub fn other(&self, p: PointId) -> PointId {
        if self.u == p {
            self.v
        } else {
            self.u
        }
    }
}

fn heaviest<'a>(edges: impl IntoIterator<Item = &'a Edge>) -> f64 {
    edges.into_iter().map(|e| e.w).fold(0.0, f64::max)
}

/// Spanning tree over a node set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tree {
    nodes: Vec<PointId>,
    edges: Vec<Edge>,
}

impl Tree {
    /// Callers are responsible for passing a tree; this only sorts the nodes.
    pub(crate) fn from_parts(mut nodes: Vec<PointId>, edges: Vec<Edge>) -> Self {
        nodes.sort_unstable();
        debug_assert_eq!(edges.len() + 1, nodes.len().max(1));
        Tree { nodes, edges }
    }

    pub fn nodes(&self) -> &[PointId] {
        &self.nodes
    }

    /// Edges in ascending `(w, u, v)` order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn cost(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn max_edge(&self) -> f64 {
        heaviest(&self.edges)
    }

    pub fn heaviest_edge(&self) -> Option<&Edge> {
        self.edges.iter().max_by(|a, b| a.cmp_key(b))
    }

    pub(crate) fn adjacency(&self) -> std::collections::BTreeMap<PointId, Vec<PointId>> {
        let mut adj: std::collections::BTreeMap<PointId, Vec<PointId>> =
            self.nodes.iter().map(|&p| (p, Vec::new())).collect();
        for e in &self.edges {
            adj.get_mut(&e.u).expect("edge endpoint is a node").push(e.v);
            adj.get_mut(&e.v).expect("edge endpoint is a node").push(e.u);
        }
        for list in adj.values_mut() {
            list.sort_unstable();
        }
        adj
    }
}

/// A set of vertex-disjoint edges.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Matching {
    edges: Vec<Edge>,
}

impl Matching {
    /// Sorts edges by `(u, v)`.
    pub fn new(mut edges: Vec<Edge>) -> Self {
        edges.sort_by_key(|a| (a.u, a.v));
        Matching { edges }
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn cost(&self) -> f64 {
        self.edges.iter().map(|e| e.w).sum()
    }

    pub fn bottleneck(&self) -> f64 {
        heaviest(&self.edges)
    }

    pub fn mate(&self, p: PointId) -> Option<PointId> {
        self.edges.iter().find(|e| e.touches(p)).map(|e| e.other(p))
    }

    /// True when every node in `nodes` is covered exactly once and no edge
    /// leaves the set.
    pub fn is_perfect_on(&self, nodes: &[PointId]) -> bool {
        let mut seen = std::collections::HashSet::new();
        let members: std::collections::HashSet<PointId> = nodes.iter().copied().collect();
        for e in &self.edges {
            if !members.contains(&e.u) || !members.contains(&e.v) {
                return false;
            }
            if !seen.insert(e.u) || !seen.insert(e.v) {
                return false;
            }
        }
        seen.len() == members.len()
    }
}

/// Closed tour visiting each of its points once.
///
/// Cost convention: a two-point tour goes there and back (`2·d`), while
/// tours on zero or one point cost nothing. The bottleneck of a two-point
/// tour is `d`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tour {
    order: Vec<PointId>,
    cost: f64,
    bottleneck: f64,
}

impl Tour {
    pub fn new<D: Distance + ?Sized>(order: Vec<PointId>, metric: &D) -> Self {
        let (cost, bottleneck) = match order.len() {
            0 | 1 => (0.0, 0.0),
            2 => {
                let d = metric.dist(order[0], order[1]);
                (2.0 * d, d)
            }
            len => {
                let mut cost = 0.0;
                let mut bottleneck: f64 = 0.0;
                for i in 0..len {
                    let d = metric.dist(order[i], order[(i + 1) % len]);
                    cost += d;
                    bottleneck = bottleneck.max(d);
                }
                (cost, bottleneck)
            }
        };
        Tour { order, cost, bottleneck }
    }

    pub fn order(&self) -> &[PointId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }

    pub fn bottleneck(&self) -> f64 {
        self.bottleneck
    }

    /// Rotated to start at the smallest id.
    pub fn rotated_to_min(&self) -> Vec<PointId> {
        let Some(start) = self.order.iter().enumerate().min_by_key(|(_, p)| **p).map(|(i, _)| i) else {
            return Vec::new();
        };
        let mut out = self.order[start..].to_vec();
        out.extend_from_slice(&self.order[..start]);
        out
    }
}

/// Simple path visiting each of its points once.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HamPath {
    order: Vec<PointId>,
    bottleneck: f64,
}

impl HamPath {
    pub fn new<D: Distance + ?Sized>(order: Vec<PointId>, metric: &D) -> Self {
        let bottleneck = order.windows(2).map(|w| metric.dist(w[0], w[1])).fold(0.0, f64::max);
        HamPath { order, bottleneck }
    }

    pub fn order(&self) -> &[PointId] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn bottleneck(&self) -> f64 {
        self.bottleneck
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &'static [f64]) -> impl Fn(PointId, PointId) -> f64 {
        move |a: PointId, b: PointId| (xs[a.0] - xs[b.0]).abs()
    }

    #[test]
    fn tour_cost_conventions() {
        let d = line(&[0.0, 1.0, 3.0]);
        assert_eq!(Tour::new(vec![], &d).cost(), 0.0);
        assert_eq!(Tour::new(vec![PointId(2)], &d).cost(), 0.0);
        let two = Tour::new(vec![PointId(0), PointId(2)], &d);
        assert_eq!((two.cost(), two.bottleneck()), (6.0, 3.0));
        let three = Tour::new(vec![PointId(0), PointId(1), PointId(2)], &d);
        assert_eq!((three.cost(), three.bottleneck()), (6.0, 3.0));
    }

    #[test]
    fn edge_orders_endpoints() {
        let e = Edge::new(PointId(4), PointId(1), 2.5);
        assert_eq!((e.u, e.v), (PointId(1), PointId(4)));
        assert_eq!(e.other(PointId(1)), PointId(4));
    }

    #[test]
    fn union_find_joins_once() {
        let mut uf = UnionFind::new(4);
        assert!(uf.union(0, 1));
        assert!(uf.union(2, 3));
        assert!(!uf.union(1, 0));
        assert!(uf.union(1, 3));
        assert_eq!(uf.find(0), uf.find(2));
    }
}
