//! Hamiltonian cycles in the cube of a tree, and path folding.

use std::collections::{BTreeMap, VecDeque};

use super::{HamPath, Tour, Tree};
use crate::instance::{Distance, PointId};

/// Hop distance from `source` to every node of the tree.
pub fn tree_hop_distances(tree: &Tree, source: PointId) -> BTreeMap<PointId, usize> {
    let adj = tree.adjacency();
    let mut dist = BTreeMap::new();
    if !adj.contains_key(&source) {
        return dist;
    }
    dist.insert(source, 0);
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[&v];
        for &w in &adj[&v] {
            if let std::collections::btree_map::Entry::Vacant(e) = dist.entry(w) {
                e.insert(dv + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

enum Task {
    Emit(PointId),
    Expand { node: PointId, parent: Option<PointId>, reversed: bool },
}

/// Hamiltonian cycle whose consecutive nodes are at most three tree hops
/// apart, rooted at the minimum id.
///
/// `P(v) = v, rev P(c_1), …, rev P(c_k)` over children in ascending id.
/// Each `P(v)` ends at a child of `v`, so block boundaries are at most three
/// hops and the closing edge is one. Fewer than three nodes give the
/// degenerate tour on those nodes.
pub fn tree_cube_hamiltonian_cycle<D: Distance + ?Sized>(tree: &Tree, metric: &D) -> Tour {
    let nodes = tree.nodes();
    if nodes.len() < 3 {
        return Tour::new(nodes.to_vec(), metric);
    }
    let adj = tree.adjacency();
    let mut order = Vec::with_capacity(nodes.len());
    let mut stack = vec![Task::Expand { node: nodes[0], parent: None, reversed: false }];
    while let Some(task) = stack.pop() {
        match task {
            Task::Emit(p) => order.push(p),
            Task::Expand { node, parent, reversed } => {
                let children = adj[&node].iter().copied().filter(|&c| Some(c) != parent);
                let mut plan = Vec::new();
                if reversed {
                    for c in children.rev() {
                        plan.push(Task::Expand { node: c, parent: Some(node), reversed: false });
                    }
                    plan.push(Task::Emit(node));
                } else {
                    plan.push(Task::Emit(node));
                    for c in children {
                        plan.push(Task::Expand { node: c, parent: Some(node), reversed: true });
                    }
                }
                stack.extend(plan.into_iter().rev());
            }
        }
    }
    Tour::new(order, metric)
}

/// Even positions forward, then odd positions backward. Every cycle edge
/// spans at most two path edges.
pub fn fold_path_to_cycle<D: Distance + ?Sized>(path: &HamPath, metric: &D) -> Tour {
    let p = path.order();
    let mut order: Vec<PointId> = p.iter().step_by(2).copied().collect();
    order.extend(p.iter().skip(1).step_by(2).rev().copied());
    Tour::new(order, metric)
}
