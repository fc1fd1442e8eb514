//! Seeded random instances and the two reduction gadgets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{metric_closure, DistanceMatrix, MetricSpace, PairInstance};

/// One step of the splitmix64 sequence; derives independent sub-seeds.
pub fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the `index`-th instance of a batch drawn from `master`.
pub fn instance_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::usage("pair count must be at least 1"));
    }
    Ok(())
}

/// Uniformly random perfect pairing of `0..2n`, each pair ascending and the
/// pairs sorted.
fn random_pairing(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut ids: Vec<usize> = (0..2 * n).collect();
    ids.shuffle(rng);
    let mut pairs: Vec<(usize, usize)> = ids.chunks(2).map(|c| (c[0].min(c[1]), c[0].max(c[1]))).collect();
    pairs.sort_unstable();
    pairs
}

pub fn random_euclidean(n: usize, seed: u64, side: f64) -> Result<PairInstance> {
    check_n(n)?;
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::usage(format!("box size must be positive, got {side}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..2 * n).map(|_| [rng.gen_range(0.0..side), rng.gen_range(0.0..side)]).collect();
    let pairs = random_pairing(n, &mut rng);
    PairInstance::new(MetricSpace::Euclidean2d(pts), pairs)
}

/// Off-diagonal entries uniform in `[1, 2]`, so every triangle holds.
pub fn random_metric(n: usize, seed: u64) -> Result<PairInstance> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = DistanceMatrix::new(2 * n, 0.0);
    for i in 0..2 * n {
        for j in i + 1..2 * n {
            m.set_symmetric(i, j, rng.gen_range(1.0..=2.0));
        }
    }
    let pairs = random_pairing(n, &mut rng);
    PairInstance::new(MetricSpace::Matrix { matrix: m, pseudometric: false }, pairs)
}

/// Points at `0, 1, ..., 2n - 1` with a random pairing.
pub fn unit_line(n: usize, seed: u64) -> Result<PairInstance> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = (0..2 * n).map(|x| x as f64).collect();
    let pairs = random_pairing(n, &mut rng);
    PairInstance::new(MetricSpace::Line1d(xs), pairs)
}

/// Distinct integer coordinates below `20n` with a random pairing.
pub fn random_line(n: usize, seed: u64) -> Result<PairInstance> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs = rand::seq::index::sample(&mut rng, 20 * n, 2 * n).into_iter().map(|x| x as f64).collect();
    let pairs = random_pairing(n, &mut rng);
    PairInstance::new(MetricSpace::Line1d(xs), pairs)
}

/// Like [`random_line`], but every pair has one point among the leftmost `n`.
pub fn separated_line(n: usize, seed: u64) -> Result<PairInstance> {
    check_n(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = rand::seq::index::sample(&mut rng, 20 * n, 2 * n).into_iter().map(|x| x as f64).collect();
    let mut by_x: Vec<usize> = (0..2 * n).collect();
    by_x.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut right = by_x[n..].to_vec();
    right.shuffle(&mut rng);
    let mut pairs: Vec<(usize, usize)> = by_x[..n].iter().zip(&right).map(|(&a, &b)| (a.min(b), a.max(b))).collect();
    pairs.sort_unstable();
    PairInstance::new(MetricSpace::Line1d(xs), pairs)
}

/// Partition gadget for min-max 2-matching. With `M = sum(xs)` and 1-based
/// `i`, pair `i` is `p_i = (iM, eps)`, `q_i = (iM, 0)` and pair `n + i` is
/// `p = (iM + x_i, eps)`, `q = (iM, eps / 2)`. Pair `k` occupies points
/// `2k` and `2k + 1`.
pub fn partition_to_minmax_matching(xs: &[u64], epsilon: f64) -> Result<PairInstance> {
    if xs.is_empty() || xs.contains(&0) {
        return Err(Error::usage("partition values must be a nonempty list of positive integers"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::usage(format!("epsilon must be positive, got {epsilon}")));
    }
    let m: u64 = xs.iter().sum();
    let m = m as f64;
    let mut pts = Vec::with_capacity(4 * xs.len());
    for (i, _) in xs.iter().enumerate() {
        let x = (i + 1) as f64 * m;
        pts.push([x, epsilon]);
        pts.push([x, 0.0]);
    }
    for (i, &xi) in xs.iter().enumerate() {
        let x = (i + 1) as f64 * m;
        pts.push([x + xi as f64, epsilon]);
        pts.push([x, epsilon / 2.0]);
    }
    PairInstance::with_canonical_pairs(MetricSpace::Euclidean2d(pts))
}

/// Connected-partition gadget for min-max 2-MST over a graph on
/// `vertices` nodes. Vertex `i` owns pair `(p_i, q_i)` at points `2i`,
/// `2i + 1`; p-p edges of the graph cost 1, q-q costs 0, p-q costs 2 and
/// everything else is the shortest path.
pub fn connected_partition_to_minmax_2mst(vertices: usize, edges: &[(usize, usize)]) -> Result<PairInstance> {
    if vertices == 0 || vertices % 2 == 1 {
        return Err(Error::usage(format!("graph needs a positive even vertex count, got {vertices}")));
    }
    let mut uf = crate::graph::UnionFind::new(vertices);
    for &(a, b) in edges {
        if a >= vertices || b >= vertices || a == b {
            return Err(Error::usage(format!("bad graph edge {a}-{b}")));
        }
        uf.union(a, b);
    }
    let root = uf.find(0);
    if (1..vertices).any(|v| uf.find(v) != root) {
        return Err(Error::usage("graph must be connected"));
    }
    let (p, q) = (|i: usize| 2 * i, |i: usize| 2 * i + 1);
    let mut m = DistanceMatrix::new(2 * vertices, f64::INFINITY);
    for i in 0..vertices {
        m.set(p(i), p(i), 0.0);
        m.set(q(i), q(i), 0.0);
        for j in 0..vertices {
            m.set_symmetric(p(i), q(j), 2.0);
            if i != j {
                m.set_symmetric(q(i), q(j), 0.0);
            }
        }
    }
    for &(a, b) in edges {
        m.set_symmetric(p(a), p(b), 1.0);
    }
    let closed = metric_closure(&m)?;
    PairInstance::with_canonical_pairs(MetricSpace::Matrix { matrix: closed, pseudometric: true })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GenSpec {
    RandomEuclidean { n: usize, seed: u64, side: f64 },
    RandomMetric { n: usize, seed: u64 },
    UnitLine { n: usize, seed: u64 },
    RandomLine { n: usize, seed: u64 },
    SeparatedLine { n: usize, seed: u64 },
    PartitionMatching { xs: Vec<u64>, epsilon: f64 },
    ConnectedPartitionMst { vertices: usize, edges: Vec<(usize, usize)> },
}

pub fn generate(spec: &GenSpec) -> Result<PairInstance> {
    match spec {
        GenSpec::RandomEuclidean { n, seed, side } => random_euclidean(*n, *seed, *side),
        GenSpec::RandomMetric { n, seed } => random_metric(*n, *seed),
        GenSpec::UnitLine { n, seed } => unit_line(*n, *seed),
        GenSpec::RandomLine { n, seed } => random_line(*n, *seed),
        GenSpec::SeparatedLine { n, seed } => separated_line(*n, *seed),
        GenSpec::PartitionMatching { xs, epsilon } => partition_to_minmax_matching(xs, *epsilon),
        GenSpec::ConnectedPartitionMst { vertices, edges } => connected_partition_to_minmax_2mst(*vertices, edges),
    }
}
