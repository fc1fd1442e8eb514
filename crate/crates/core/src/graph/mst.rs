use super::{Edge, Tree, UnionFind};
use crate::error::{Error, Result};
use crate::instance::{Distance, PointId};

/// Kruskal over the complete graph on `points`, scanning edges in ascending
/// `(w, u, v)` order.
///
/// Every minimum spanning tree also minimizes the k-th heaviest edge for
/// every k, so the result is a minimum bottleneck spanning tree as well.
pub fn minimum_spanning_tree<D: Distance + ?Sized>(points: &[PointId], metric: &D) -> Result<Tree> {
    if points.is_empty() {
        return Err(Error::usage("spanning tree over an empty point set"));
    }
    let mut nodes = points.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    let m = nodes.len();

    let mut candidates = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            candidates.push(Edge::measured(nodes[i], nodes[j], metric));
        }
    }
    candidates.sort_by(Edge::cmp_key);

    let index_of = |p: PointId| nodes.binary_search(&p).expect("edge endpoint is a node");
    let mut uf = UnionFind::new(m);
    let mut edges = Vec::with_capacity(m.saturating_sub(1));
    for e in candidates {
        if uf.union(index_of(e.u), index_of(e.v)) {
            edges.push(e);
            if edges.len() + 1 == m {
                break;
            }
        }
    }
    Ok(Tree::from_parts(nodes, edges))
}

/// Depth-first preorder from `root`, visiting children by ascending id.
pub fn preorder_traversal(tree: &Tree, root: PointId) -> Result<Vec<PointId>> {
    if tree.nodes().binary_search(&root).is_err() {
        return Err(Error::usage(format!("root {root} is not a node of the tree")));
    }
    let adj = tree.adjacency();
    let mut order = Vec::with_capacity(tree.nodes().len());
    let mut stack = vec![(root, None::<PointId>)];
    while let Some((node, parent)) = stack.pop() {
        order.push(node);
        for &child in adj[&node].iter().rev() {
            if Some(child) != parent {
                stack.push((child, Some(node)));
            }
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn ids(n: usize) -> Vec<PointId> {
        (0..n).map(PointId).collect()
    }

    /// Every spanning tree of the complete graph, by filtering edge subsets.
    fn all_spanning_trees(m: usize, w: &dyn Fn(usize, usize) -> f64) -> Vec<Vec<(usize, usize, f64)>> {
        let all: Vec<(usize, usize, f64)> = (0..m).tuple_combinations().map(|(i, j)| (i, j, w(i, j))).collect();
        all.into_iter()
            .combinations(m - 1)
            .filter(|subset| {
                let mut uf = UnionFind::new(m);
                subset.iter().all(|&(i, j, _)| uf.union(i, j))
            })
            .collect()
    }

    #[test]
    fn line_example_matches_enumeration() {
        let xs = [0.0, 1.0, 3.0, 10.0];
        let d = |a: PointId, b: PointId| f64::abs(xs[a.0] - xs[b.0]);
        let trees = all_spanning_trees(4, &|i, j| f64::abs(xs[i] - xs[j]));
        assert_eq!(trees.len(), 16);
        let best = trees.iter().map(|t| t.iter().map(|e| e.2).sum::<f64>()).fold(f64::INFINITY, f64::min);
        assert_eq!(best, 10.0);

        let t = minimum_spanning_tree(&ids(4), &d).unwrap();
        assert_eq!(t.cost(), 10.0);
        let pairs: Vec<_> = t.edges().iter().map(|e| (e.u.0, e.v.0)).collect();
        assert_eq!(pairs, vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn trivial_sizes() {
        let d = |_: PointId, _: PointId| 5.0;
        let single = minimum_spanning_tree(&[PointId(3)], &d).unwrap();
        assert!(single.edges().is_empty());
        assert_eq!(single.cost(), 0.0);
        let two = minimum_spanning_tree(&[PointId(0), PointId(1)], &d).unwrap();
        assert_eq!((two.edges().len(), two.cost()), (1, 5.0));
        assert!(matches!(minimum_spanning_tree(&[], &d), Err(Error::Usage(_))));
    }

    #[test]
    fn sorted_weights_are_lexicographically_minimal() {
        let pts = [[0.0, 0.0], [2.0, 1.0], [1.0, 3.0], [4.0, 0.5], [3.0, 3.0], [0.5, 1.5]];
        let w = |i: usize, j: usize| f64::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
        let d = |a: PointId, b: PointId| w(a.0, b.0);
        let t = minimum_spanning_tree(&ids(6), &d).unwrap();
        let desc = |mut v: Vec<f64>| {
            v.sort_by(|a, b| b.total_cmp(a));
            v
        };
        let ours = desc(t.edges().iter().map(|e| e.w).collect());
        for tree in all_spanning_trees(6, &w) {
            let theirs = desc(tree.iter().map(|e| e.2).collect());
            for (a, b) in ours.iter().zip(&theirs) {
                if a != b {
                    assert!(a < b, "{ours:?} vs {theirs:?}");
                    break;
                }
            }
        }
    }

    #[test]
    fn preorder_visits_children_in_id_order() {
        let star = Tree::from_parts(
            ids(4),
            vec![
                Edge::new(PointId(0), PointId(3), 1.0),
                Edge::new(PointId(0), PointId(1), 1.0),
                Edge::new(PointId(0), PointId(2), 1.0),
            ],
        );
        assert_eq!(preorder_traversal(&star, PointId(0)).unwrap(), ids(4));

        let path = Tree::from_parts(
            ids(3),
            vec![Edge::new(PointId(0), PointId(1), 1.0), Edge::new(PointId(1), PointId(2), 1.0)],
        );
        assert_eq!(preorder_traversal(&path, PointId(0)).unwrap(), ids(3));
        assert_eq!(preorder_traversal(&path, PointId(1)).unwrap(), vec![PointId(1), PointId(0), PointId(2)]);
        assert!(matches!(preorder_traversal(&path, PointId(7)), Err(Error::Usage(_))));
    }
}
