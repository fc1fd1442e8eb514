//! Problem selectors and the dispatch from a selector to its algorithm.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Matching, Tour, Tree};
use crate::instance::{Coloring, MetricKind, PairInstance};
use crate::two_matching::{bottleneck_2matching, minmax_2matching, minsum_2matching, MatchReport};
use crate::two_mst::{
    bottleneck_2mst_line, bottleneck_2mst_metric, minmax_2mst, minsum_2mst, steiner_ratio, MstReport,
};
use crate::two_tsp::{bottleneck_2tsp, minmax_2tsp, minsum_2tsp, TspParams, TspReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    Mst,
    Matching,
    Tsp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Sum,
    Max,
    Bottleneck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub structure: Structure,
    pub objective: Objective,
}

impl ProblemSpec {
    pub const fn new(structure: Structure, objective: Objective) -> Self {
        ProblemSpec { structure, objective }
    }

    pub fn all() -> impl Iterator<Item = ProblemSpec> {
        [Structure::Mst, Structure::Matching, Structure::Tsp].into_iter().flat_map(|s| {
            [Objective::Sum, Objective::Max, Objective::Bottleneck].into_iter().map(move |o| ProblemSpec::new(s, o))
        })
    }

    /// Stable algorithm identifier used in reports and tables.
    pub fn algorithm_id(&self, kind: MetricKind) -> &'static str {
        use Objective::*;
        use Structure::*;
        match (self.structure, self.objective) {
            (Mst, Sum) => "minsum-2mst",
            (Mst, Max) => "minmax-2mst",
            (Mst, Bottleneck) if kind == MetricKind::Line1d => "bottleneck-2mst-line",
            (Mst, Bottleneck) => "bottleneck-2mst-metric",
            (Matching, Sum) => "minsum-2matching",
            (Matching, Max) => "minmax-2matching",
            (Matching, Bottleneck) => "bottleneck-2matching",
            (Tsp, Sum) => "minsum-2tsp",
            (Tsp, Max) => "minmax-2tsp",
            (Tsp, Bottleneck) => "bottleneck-2tsp",
        }
    }

    /// Worst-case factor label, e.g. `3α` or `6β`.
    pub fn bound_label(&self, kind: MetricKind) -> &'static str {
        use Objective::*;
        use Structure::*;
        match (self.structure, self.objective) {
            (Mst, Sum) => "3α",
            (Mst, Max) => "4α",
            (Mst, Bottleneck) if kind == MetricKind::Line1d => "3",
            (Mst, Bottleneck) => "9",
            (Matching, Sum) => "2",
            (Matching, Max) | (Matching, Bottleneck) => "3",
            (Tsp, Sum) => "3β",
            (Tsp, Max) => "6β",
            (Tsp, Bottleneck) => "18",
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Structure::Mst => "mst",
            Structure::Matching => "matching",
            Structure::Tsp => "tsp",
        })
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Sum => "sum",
            Objective::Max => "max",
            Objective::Bottleneck => "bottleneck",
        })
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.structure, self.objective)
    }
}

impl FromStr for Structure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mst" => Ok(Structure::Mst),
            "matching" => Ok(Structure::Matching),
            "tsp" => Ok(Structure::Tsp),
            _ => Err(Error::usage(format!("unknown problem `{s}`"))),
        }
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Objective::Sum),
            "max" => Ok(Objective::Max),
            "bottleneck" => Ok(Objective::Bottleneck),
            _ => Err(Error::usage(format!("unknown objective `{s}`"))),
        }
    }
}

/// Per-side structures of a solution.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Networks {
    Trees { red: Tree, blue: Tree },
    Matchings { red: Matching, blue: Matching },
    Tours { red: Tour, blue: Tour },
}

/// Uniform view of any solver's result.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Solution {
    pub coloring: Coloring,
    pub networks: Networks,
    pub sum: f64,
    pub max: f64,
    pub bottleneck: f64,
    pub value: f64,
    /// `None` when the configuration voids the guarantee.
    pub guarantee_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumerated_count: Option<usize>,
}

fn pick(objective: Objective, sum: f64, max: f64, bottleneck: f64) -> f64 {
    match objective {
        Objective::Sum => sum,
        Objective::Max => max,
        Objective::Bottleneck => bottleneck,
    }
}

impl Solution {
    fn from_mst(r: MstReport, objective: Objective) -> Self {
        Solution {
            value: pick(objective, r.sum, r.max, r.bottleneck),
            coloring: r.coloring,
            networks: Networks::Trees { red: r.red_tree, blue: r.blue_tree },
            sum: r.sum,
            max: r.max,
            bottleneck: r.bottleneck,
            guarantee_factor: Some(r.guarantee_factor),
            enumerated_count: None,
        }
    }

    fn from_matching(r: MatchReport, objective: Objective) -> Self {
        Solution {
            value: pick(objective, r.sum, r.max, r.bottleneck),
            coloring: r.coloring,
            networks: Networks::Matchings { red: r.red_matching, blue: r.blue_matching },
            sum: r.sum,
            max: r.max,
            bottleneck: r.bottleneck,
            guarantee_factor: Some(r.guarantee_factor),
            enumerated_count: None,
        }
    }

    fn from_tsp(r: TspReport, objective: Objective) -> Self {
        Solution {
            value: pick(objective, r.sum, r.max, r.bottleneck),
            coloring: r.coloring,
            networks: Networks::Tours { red: r.red_tour, blue: r.blue_tour },
            sum: r.sum,
            max: r.max,
            bottleneck: r.bottleneck,
            guarantee_factor: r.guarantee_factor,
            enumerated_count: (objective != Objective::Bottleneck).then_some(r.enumerated_count),
        }
    }
}

/// Runs the approximation for `spec`. Line instances use the line
/// algorithm for the bottleneck tree.
pub fn solve(inst: &PairInstance, spec: ProblemSpec, params: &TspParams) -> Result<Solution> {
    use Objective::*;
    use Structure::*;
    let o = spec.objective;
    Ok(match (spec.structure, o) {
        (Mst, Sum) => Solution::from_mst(minsum_2mst(inst)?, o),
        (Mst, Max) => Solution::from_mst(minmax_2mst(inst)?, o),
        (Mst, Bottleneck) if inst.kind() == MetricKind::Line1d => Solution::from_mst(bottleneck_2mst_line(inst)?, o),
        (Mst, Bottleneck) => Solution::from_mst(bottleneck_2mst_metric(inst)?.report, o),
        (Matching, Sum) => Solution::from_matching(minsum_2matching(inst)?, o),
        (Matching, Max) => Solution::from_matching(minmax_2matching(inst)?, o),
        (Matching, Bottleneck) => Solution::from_matching(bottleneck_2matching(inst)?, o),
        (Tsp, Sum) => Solution::from_tsp(minsum_2tsp(inst, params)?, o),
        (Tsp, Max) => Solution::from_tsp(minmax_2tsp(inst, params)?, o),
        (Tsp, Bottleneck) => Solution::from_tsp(bottleneck_2tsp(inst)?, o),
    })
}

/// Numeric bound for the table label under the instance's metric.
pub fn guarantee_bound(spec: ProblemSpec, inst: &PairInstance, params: &TspParams) -> f64 {
    let alpha = steiner_ratio(inst.kind());
    let beta = params.subroutine.resolve(inst).factor();
    let sep = params.separation_factor();
    match spec.bound_label(inst.kind()) {
        "3α" => 3.0 * alpha,
        "4α" => 4.0 * alpha,
        "3β" => sep * beta,
        "6β" => 2.0 * sep * beta,
        other => other.parse().expect("numeric bound label"),
    }
}
