use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bottleneck_perfect_matching, exact_min_weight_perfect_matching, Edge, Matching};
use crate::instance::{cmp_weighted, Distance, PairInstance, PointId};

/// Which aggregate a matching minimizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchObjective {
    Sum,
    Bottleneck,
}

/// One node per pair; the edge between two pairs costs the cheapest of the
/// four cross distances.
#[derive(Clone, Debug)]
pub struct CollapsedPairGraph {
    n: usize,
    weight: Vec<f64>,
    realizer: Vec<(PointId, PointId)>,
}

impl CollapsedPairGraph {
    pub fn new(inst: &PairInstance) -> Self {
        let n = inst.pair_count();
        let mut weight = vec![0.0; n * n];
        let mut realizer = vec![(PointId(0), PointId(0)); n * n];
        for i in 0..n {
            let (pi, qi) = inst.pairs()[i];
            for j in i + 1..n {
                let (pj, qj) = inst.pairs()[j];
                let best = [(pi, pj), (pi, qj), (qi, pj), (qi, qj)]
                    .into_iter()
                    .map(|(a, b)| {
                        let (a, b) = if a < b { (a, b) } else { (b, a) };
                        (inst.dist(a, b), a, b)
                    })
                    .min_by(|x, y| cmp_weighted(*x, *y))
                    .expect("four candidates");
                for (x, y) in [(i, j), (j, i)] {
                    weight[x * n + y] = best.0;
                    realizer[x * n + y] = (best.1, best.2);
                }
            }
        }
        CollapsedPairGraph { n, weight, realizer }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.weight[i * self.n + j]
    }

    /// Points attaining [`weight`](Self::weight), smaller id first.
    pub fn realizer(&self, i: usize, j: usize) -> (PointId, PointId) {
        self.realizer[i * self.n + j]
    }
}

/// Perfect matching on one chosen point per pair, minimizing total or
/// heaviest edge. The chosen points are exactly the matched endpoints.
pub fn one_of_pair_matching(inst: &PairInstance, objective: MatchObjective) -> Result<Matching> {
    let n = inst.pair_count();
    if n % 2 == 1 {
        return Err(Error::infeasible(format!("one-of-pair matching requires even n, got {n}")));
    }
    let graph = CollapsedPairGraph::new(inst);
    let nodes: Vec<PointId> = (0..n).map(PointId).collect();
    let w = |a: PointId, b: PointId| graph.weight(a.0, b.0);
    let collapsed = match objective {
        MatchObjective::Sum => exact_min_weight_perfect_matching(&nodes, &w, &[])?,
        MatchObjective::Bottleneck => bottleneck_perfect_matching(&nodes, &w, &[])?,
    };
    Ok(Matching::new(
        collapsed
            .edges()
            .iter()
            .map(|e| {
                let (a, b) = graph.realizer(e.u.0, e.v.0);
                Edge::new(a, b, e.w)
            })
            .collect(),
    ))
}
