//! Colorings for the 2-MST objectives.
//!
//! Min-sum and min-max share the heaviest-edge split coloring. Bottleneck
//! uses the bucket chain coloring, on the sorted line or along a tree-cube
//! tour in general metrics.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{
    bipartite_perfect_matching, minimum_spanning_tree, preorder_traversal, tree_cube_hamiltonian_cycle,
    BipartiteOutcome, HamPath, Tree, UnionFind,
};
use crate::instance::{Color, Coloring, MetricKind, PairInstance, PointId};

/// Steiner ratio upper bound used for planar and line instances.
pub const EUCLIDEAN_STEINER_RATIO: f64 = 1.3546;
/// Steiner ratio of a general metric.
pub const METRIC_STEINER_RATIO: f64 = 2.0;

pub fn steiner_ratio(kind: MetricKind) -> f64 {
    match kind {
        MetricKind::Euclidean2d | MetricKind::Line1d => EUCLIDEAN_STEINER_RATIO,
        MetricKind::Matrix => METRIC_STEINER_RATIO,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MstReport {
    pub coloring: Coloring,
    pub red_tree: Tree,
    pub blue_tree: Tree,
    pub sum: f64,
    pub max: f64,
    pub bottleneck: f64,
    pub guarantee_factor: f64,
}

impl MstReport {
    /// Exact minimum spanning trees on both sides of `coloring`.
    pub fn from_coloring(inst: &PairInstance, coloring: Coloring, guarantee_factor: f64) -> Result<Self> {
        let red_tree = minimum_spanning_tree(coloring.red(), inst)?;
        let blue_tree = minimum_spanning_tree(coloring.blue(), inst)?;
        let (r, b) = (red_tree.cost(), blue_tree.cost());
        Ok(MstReport {
            bottleneck: red_tree.max_edge().max(blue_tree.max_edge()),
            sum: r + b,
            max: r.max(b),
            coloring,
            red_tree,
            blue_tree,
            guarantee_factor,
        })
    }
}

/// Splits `MST(S)` into the components left after dropping its heaviest
/// edge. The first component contains the minimum id.
fn split_components(tree: &Tree) -> (Vec<PointId>, Vec<PointId>) {
    let nodes = tree.nodes();
    let Some(heavy) = tree.heaviest_edge().copied() else {
        return (nodes.to_vec(), Vec::new());
    };
    let idx = |p: PointId| nodes.binary_search(&p).expect("tree node");
    let mut uf = UnionFind::new(nodes.len());
    for e in tree.edges().iter().filter(|e| **e != heavy) {
        uf.union(idx(e.u), idx(e.v));
    }
    let root = uf.find(0);
    nodes.iter().copied().partition(|&p| uf.find(idx(p)) == root)
}

fn subtree(tree: &Tree, nodes: &[PointId]) -> Tree {
    let edges = tree
        .edges()
        .iter()
        .filter(|e| nodes.binary_search(&e.u).is_ok() && nodes.binary_search(&e.v).is_ok())
        .copied()
        .collect();
    Tree::from_parts(nodes.to_vec(), edges)
}

/// Drop the heaviest edge of `MST(S)` and color each component in preorder
/// from its minimum id: red unless the partner is already red.
pub fn split_by_heaviest_edge_coloring(inst: &PairInstance) -> Result<Coloring> {
    let all: Vec<PointId> = inst.points().collect();
    let mst = minimum_spanning_tree(&all, inst)?;
    let (first, second) = split_components(&mst);
    let mut side: Vec<Option<Color>> = vec![None; inst.point_count()];
    for component in [first, second] {
        if component.is_empty() {
            continue;
        }
        let t = subtree(&mst, &component);
        for p in preorder_traversal(&t, component[0])? {
            let partner_red = side[inst.partner(p).0] == Some(Color::Red);
            side[p.0] = Some(if partner_red { Color::Blue } else { Color::Red });
        }
    }
    let sides: Vec<Color> = side
        .into_iter()
        .map(|c| c.ok_or_else(|| Error::internal("split coloring missed a point")))
        .collect::<Result<_>>()?;
    let coloring = Coloring::from_sides(&sides);
    if !inst.is_feasible(&coloring) {
        return Err(Error::internal("split coloring is not feasible"));
    }
    Ok(coloring)
}

pub fn minsum_2mst(inst: &PairInstance) -> Result<MstReport> {
    let coloring = split_by_heaviest_edge_coloring(inst)?;
    MstReport::from_coloring(inst, coloring, 3.0 * steiner_ratio(inst.kind()))
}

pub fn minmax_2mst(inst: &PairInstance) -> Result<MstReport> {
    let coloring = split_by_heaviest_edge_coloring(inst)?;
    MstReport::from_coloring(inst, coloring, 4.0 * steiner_ratio(inst.kind()))
}

/// The bucket chain procedure over an arbitrary linear order of all points.
///
/// Buckets are positions `(2i, 2i+1)`. Starting from the earliest uncolored
/// point colored red, the chain alternates partner-gets-blue and
/// bucket-mate-gets-red until the starting bucket is full, then restarts.
/// Ends with one red and one blue point in every bucket.
pub fn chain_coloring(inst: &PairInstance, order: &[PointId]) -> Result<Coloring> {
    let m = inst.point_count();
    if order.len() != m {
        return Err(Error::usage(format!("order has {} points, instance has {m}", order.len())));
    }
    let mut position = vec![usize::MAX; m];
    for (i, &p) in order.iter().enumerate() {
        if p.0 >= m || position[p.0] != usize::MAX {
            return Err(Error::usage("order is not a permutation of the points"));
        }
        position[p.0] = i;
    }
    let bucket_mate = |p: PointId| order[position[p.0] ^ 1];

    let mut side: Vec<Option<Color>> = vec![None; m];
    for &start in order {
        if side[start.0].is_some() {
            continue;
        }
        paint(&mut side, start, Color::Red)?;
        let anchor = bucket_mate(start);
        let mut p = start;
        while side[anchor.0].is_none() {
            if side[p.0] == Some(Color::Red) {
                let q = inst.partner(p);
                paint(&mut side, q, Color::Blue)?;
                p = q;
            } else {
                let q = bucket_mate(p);
                paint(&mut side, q, Color::Red)?;
                p = q;
            }
        }
    }
    let sides: Vec<Color> = side.into_iter().map(|c| c.unwrap_or(Color::Blue)).collect();
    for duo in order.chunks(2) {
        if sides[duo[0].0] == sides[duo[1].0] {
            return Err(Error::internal("chain coloring left a bucket monochromatic"));
        }
    }
    let coloring = Coloring::from_sides(&sides);
    if !inst.is_feasible(&coloring) {
        return Err(Error::internal("chain coloring is not feasible"));
    }
    Ok(coloring)
}

fn paint(side: &mut [Option<Color>], p: PointId, c: Color) -> Result<()> {
    if side[p.0].is_some() {
        return Err(Error::internal(format!("chain coloring revisits point {p}")));
    }
    side[p.0] = Some(c);
    Ok(())
}

/// Points sorted by `(coordinate, id)`.
pub fn line_order(inst: &PairInstance) -> Result<Vec<PointId>> {
    if inst.kind() != MetricKind::Line1d {
        return Err(Error::usage(format!("line coloring needs a line1d metric, got {}", inst.kind())));
    }
    let mut order: Vec<PointId> = inst.points().collect();
    order.sort_by(|&a, &b| {
        let (xa, xb) = (inst.line_coordinate(a).unwrap_or(0.0), inst.line_coordinate(b).unwrap_or(0.0));
        xa.total_cmp(&xb).then(a.cmp(&b))
    });
    Ok(order)
}

/// Chain coloring over the sorted line.
pub fn line_chain_coloring(inst: &PairInstance) -> Result<Coloring> {
    chain_coloring(inst, &line_order(inst)?)
}

fn has_pair_inside(inst: &PairInstance, points: &[PointId]) -> bool {
    let mut inside = vec![false; inst.point_count()];
    for p in points {
        inside[p.0] = true;
    }
    points.iter().any(|&p| inside[inst.partner(p).0])
}

/// Left/right split when the leftmost half holds no pair, otherwise the
/// chain coloring.
pub fn bottleneck_2mst_line(inst: &PairInstance) -> Result<MstReport> {
    let order = line_order(inst)?;
    let n = inst.pair_count();
    let coloring = if has_pair_inside(inst, &order[..n]) {
        chain_coloring(inst, &order)?
    } else {
        Coloring::new(order[..n].iter().copied(), order[n..].iter().copied())
    };
    MstReport::from_coloring(inst, coloring, 3.0)
}

/// Result of the metric bottleneck algorithm: the tree report plus one
/// Hamiltonian path per side.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BottleneckPaths {
    pub report: MstReport,
    pub red_path: HamPath,
    pub blue_path: HamPath,
}

fn side_paths(inst: &PairInstance, coloring: &Coloring, order: &[PointId]) -> (HamPath, HamPath) {
    let (red, blue): (Vec<PointId>, Vec<PointId>) =
        order.iter().copied().partition(|&p| coloring.color_of(p) == Some(Color::Red));
    (HamPath::new(red, inst), HamPath::new(blue, inst))
}

/// MST split when it separates every pair, otherwise chain coloring along
/// the tree-cube tour of `MST(S)` from the minimum id.
pub fn bottleneck_2mst_metric(inst: &PairInstance) -> Result<BottleneckPaths> {
    let all: Vec<PointId> = inst.points().collect();
    let mst = minimum_spanning_tree(&all, inst)?;
    let (first, second) = split_components(&mst);
    if !has_pair_inside(inst, &first) && !has_pair_inside(inst, &second) {
        let coloring = Coloring::new(first.iter().copied(), second.iter().copied());
        let report = MstReport::from_coloring(inst, coloring, 9.0)?;
        let red_path = HamPath::new(tree_cube_hamiltonian_cycle(&report.red_tree, inst).order().to_vec(), inst);
        let blue_path = HamPath::new(tree_cube_hamiltonian_cycle(&report.blue_tree, inst).order().to_vec(), inst);
        return Ok(BottleneckPaths { report, red_path, blue_path });
    }
    let tour = tree_cube_hamiltonian_cycle(&mst, inst);
    let order = tour.rotated_to_min();
    let coloring = chain_coloring(inst, &order)?;
    let (red_path, blue_path) = side_paths(inst, &coloring, &order);
    let report = MstReport::from_coloring(inst, coloring, 9.0)?;
    Ok(BottleneckPaths { report, red_path, blue_path })
}

/// `colors[i][j]` is the color in `1..=k` of point `j` of tuple `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TupleColoring {
    pub k: usize,
    pub colors: Vec<Vec<usize>>,
}

/// Rainbow-colors `n` k-tuples of line points in `k` matching rounds so that
/// between consecutive points of one color lie at most `2k - 2` points.
///
/// Round `j` cuts the uncolored points into `n` consecutive buckets of
/// `k - j` points and matches buckets to tuples that meet them.
pub fn k_tuple_line_coloring(tuples: &[Vec<f64>], k: usize) -> Result<TupleColoring> {
    if k < 2 {
        return Err(Error::usage(format!("tuple size must be at least 2, got {k}")));
    }
    if let Some(bad) = tuples.iter().find(|t| t.len() != k) {
        return Err(Error::usage(format!("tuple of size {} where {k} expected", bad.len())));
    }
    let mut points: Vec<(f64, usize, usize)> =
        tuples.iter().enumerate().flat_map(|(i, t)| t.iter().enumerate().map(move |(j, &x)| (x, i, j))).collect();
    if points.iter().any(|p| !p.0.is_finite()) {
        return Err(Error::usage("tuple coordinates must be finite"));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));
    if points.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::usage("tuple coordinates must be distinct"));
    }

    let n = tuples.len();
    let mut colors = vec![vec![0usize; k]; n];
    for round in 0..k {
        let size = k - round;
        let remaining: Vec<(usize, usize)> =
            points.iter().filter(|p| colors[p.1][p.2] == 0).map(|p| (p.1, p.2)).collect();
        let buckets: Vec<&[(usize, usize)]> = remaining.chunks(size).collect();
        let adjacency: Vec<Vec<usize>> = buckets.iter().map(|b| b.iter().map(|&(t, _)| t).collect()).collect();
        let BipartiteOutcome::Perfect(mate) = bipartite_perfect_matching(n, n, &adjacency)? else {
            return Err(Error::internal(format!("no bucket matching in round {}", round + 1)));
        };
        for (bucket, &tuple) in buckets.iter().zip(&mate) {
            let &(_, j) = bucket.iter().find(|&&(t, _)| t == tuple).expect("matched tuple meets bucket");
            colors[tuple][j] = round + 1;
        }
    }
    Ok(TupleColoring { k, colors })
}

/// Largest number of points strictly between two consecutive points of the
/// same color.
pub fn max_color_gap(tuples: &[Vec<f64>], coloring: &TupleColoring) -> usize {
    let mut points: Vec<(f64, usize)> =
        tuples.iter().zip(&coloring.colors).flat_map(|(t, c)| t.iter().copied().zip(c.iter().copied())).collect();
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut last = vec![None::<usize>; coloring.k + 1];
    let mut gap = 0;
    for (pos, &(_, color)) in points.iter().enumerate() {
        if let Some(prev) = last[color] {
            gap = gap.max(pos - prev - 1);
        }
        last[color] = Some(pos);
    }
    gap
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::MetricSpace;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(xs: &[f64], pairs: &[(usize, usize)]) -> PairInstance {
        PairInstance::new(MetricSpace::Line1d(xs.to_vec()), pairs.to_vec()).unwrap()
    }

    fn ids(v: &[usize]) -> Vec<PointId> {
        v.iter().copied().map(PointId).collect()
    }

    /// Best objective over every feasible coloring, with exact MSTs per side.
    fn brute(inst: &PairInstance, value: impl Fn(&MstReport) -> f64) -> f64 {
        let n = inst.pair_count();
        (0..1usize << n)
            .map(|bits| {
                let choices: Vec<bool> = (0..n).map(|i| bits >> i & 1 == 1).collect();
                let c = Coloring::from_choices(inst, &choices);
                value(&MstReport::from_coloring(inst, c, 1.0).unwrap())
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn sample() -> PairInstance {
        // p1=0, p2=1, q1=3, q2=10
        line(&[0.0, 1.0, 3.0, 10.0], &[(0, 2), (1, 3)])
    }

    #[test]
    fn split_coloring_on_sample() {
        let inst = sample();
        let c = split_by_heaviest_edge_coloring(&inst).unwrap();
        assert_eq!(c.red(), ids(&[0, 1]).as_slice());
        assert_eq!(c.blue(), ids(&[2, 3]).as_slice());
        let r = minsum_2mst(&inst).unwrap();
        assert_eq!(r.sum, 8.0);
        assert_eq!(brute(&inst, |r| r.sum), 8.0);
        let r = minmax_2mst(&inst).unwrap();
        assert_eq!(r.max, 7.0);
        assert_eq!(brute(&inst, |r| r.max), 7.0);
        assert!((r.guarantee_factor - 4.0 * 1.3546).abs() < 1e-12);
    }

    #[test]
    fn single_pair() {
        let inst = line(&[5.0, 2.0], &[(0, 1)]);
        let c = split_by_heaviest_edge_coloring(&inst).unwrap();
        assert_eq!((c.red(), c.blue()), (ids(&[0]).as_slice(), ids(&[1]).as_slice()));
        assert_eq!(minsum_2mst(&inst).unwrap().sum, 0.0);
        assert_eq!(minmax_2mst(&inst).unwrap().max, 0.0);
        let lc = line_chain_coloring(&inst).unwrap();
        assert_eq!(lc.red(), ids(&[1]).as_slice());
        assert_eq!(bottleneck_2mst_metric(&inst).unwrap().report.bottleneck, 0.0);
    }

    #[test]
    fn pair_free_split_is_optimal() {
        // Two far clusters, each holding one point of every pair.
        let xs = [0.0, 100.0, 1.0, 102.0, 3.0, 101.0];
        let inst = line(&xs, &[(0, 1), (2, 3), (4, 5)]);
        let c = split_by_heaviest_edge_coloring(&inst).unwrap();
        assert_eq!(c.red(), ids(&[0, 2, 4]).as_slice());
        let r = minsum_2mst(&inst).unwrap();
        assert_eq!(r.sum, brute(&inst, |r| r.sum));
        let b = bottleneck_2mst_metric(&inst).unwrap();
        assert_eq!(b.report.bottleneck, brute(&inst, |r| r.bottleneck));
        let l = bottleneck_2mst_line(&inst).unwrap();
        assert_eq!(l.bottleneck, brute(&inst, |r| r.bottleneck));
    }

    #[test]
    fn chain_on_unit_points() {
        let xs: Vec<f64> = (0..6).map(f64::from).collect();
        let inst = line(&xs, &[(0, 1), (2, 3), (4, 5)]);
        let c = line_chain_coloring(&inst).unwrap();
        assert_eq!(c.red(), ids(&[0, 2, 4]).as_slice());
        assert_eq!(c.blue(), ids(&[1, 3, 5]).as_slice());
        let plane = PairInstance::with_canonical_pairs(MetricSpace::Euclidean2d(vec![[0.0, 0.0], [1.0, 0.0]])).unwrap();
        assert!(matches!(line_chain_coloring(&plane), Err(Error::Usage(_))));
    }

    #[test]
    fn unit_line_gap_is_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let n = rng.gen_range(1..=9);
            let mut perm: Vec<usize> = (0..2 * n).collect();
            perm.shuffle(&mut rng);
            let xs: Vec<f64> = perm.iter().map(|&v| v as f64).collect();
            let pairs: Vec<(usize, usize)> = (0..n).map(|i| (2 * i, 2 * i + 1)).collect();
            let inst = line(&xs, &pairs);
            let c = line_chain_coloring(&inst).unwrap();
            let r = MstReport::from_coloring(&inst, c, 3.0).unwrap();
            assert!(r.bottleneck <= 3.0);
        }
    }

    #[test]
    fn bottleneck_ratios_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..60 {
            let n = rng.gen_range(2..=5);
            let xs: Vec<f64> = (0..2 * n).map(|_| rng.gen_range(0.0..50.0)).collect();
            let mut perm: Vec<usize> = (0..2 * n).collect();
            perm.shuffle(&mut rng);
            let pairs: Vec<(usize, usize)> = (0..n).map(|i| (perm[2 * i], perm[2 * i + 1])).collect();
            let inst = line(&xs, &pairs);
            let opt = brute(&inst, |r| r.bottleneck);
            let l = bottleneck_2mst_line(&inst).unwrap();
            assert!(l.bottleneck <= 3.0 * opt * (1.0 + 1e-9));
            let m = bottleneck_2mst_metric(&inst).unwrap();
            assert!(m.report.bottleneck <= 9.0 * opt * (1.0 + 1e-9));
            assert!(m.red_path.bottleneck() <= 9.0 * opt * (1.0 + 1e-9));
            assert!(m.blue_path.bottleneck() <= 9.0 * opt * (1.0 + 1e-9));
            assert_eq!(m.red_path.len(), n);
        }
    }

    #[test]
    fn tuple_coloring_examples() {
        let tuples = vec![vec![0.0, 1.0, 2.0], vec![3.0, 4.0, 5.0]];
        let c = k_tuple_line_coloring(&tuples, 3).unwrap();
        for t in &c.colors {
            let mut s = t.clone();
            s.sort_unstable();
            assert_eq!(s, vec![1, 2, 3]);
        }
        assert!(max_color_gap(&tuples, &c) <= 4);
        assert!(matches!(k_tuple_line_coloring(&[vec![0.0, 0.0]], 2), Err(Error::Usage(_))));
        assert!(matches!(k_tuple_line_coloring(&[vec![0.0]], 2), Err(Error::Usage(_))));
    }

    #[test]
    fn paired_tuples_match_bucket_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let k = rng.gen_range(2..=4);
            let n = rng.gen_range(2..=6);
            let mut xs: Vec<f64> = (0..n * k).map(|v| v as f64 * 1.5).collect();
            xs.shuffle(&mut rng);
            let tuples: Vec<Vec<f64>> = xs.chunks(k).map(|c| c.to_vec()).collect();
            let c = k_tuple_line_coloring(&tuples, k).unwrap();
            for t in &c.colors {
                let mut s = t.clone();
                s.sort_unstable();
                assert_eq!(s, (1..=k).collect::<Vec<_>>());
            }
            assert!(max_color_gap(&tuples, &c) <= 2 * k - 2);
        }
    }
}
