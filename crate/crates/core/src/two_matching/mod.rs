//! Colorings for the 2-matching objectives.

mod collapsed;
mod factor;

pub use collapsed::{one_of_pair_matching, CollapsedPairGraph, MatchObjective};
pub use factor::{color_cycles, is_walk, merge_odd_cycles, pair_2factor, FactorCycle, Link, LinkOrigin, TwoFactor};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{exact_min_weight_perfect_matching, Matching};
use crate::instance::{Color, Coloring, PairInstance, PointId};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchReport {
    pub coloring: Coloring,
    pub red_matching: Matching,
    pub blue_matching: Matching,
    pub sum: f64,
    pub max: f64,
    pub bottleneck: f64,
    pub guarantee_factor: f64,
}

impl MatchReport {
    fn new(coloring: Coloring, red_matching: Matching, blue_matching: Matching, guarantee_factor: f64) -> Self {
        let (r, b) = (red_matching.cost(), blue_matching.cost());
        MatchReport {
            bottleneck: red_matching.bottleneck().max(blue_matching.bottleneck()),
            sum: r + b,
            max: r.max(b),
            coloring,
            red_matching,
            blue_matching,
            guarantee_factor,
        }
    }
}

fn split_by_one_of_pair(inst: &PairInstance, guarantee_factor: f64) -> Result<MatchReport> {
    let hat = one_of_pair_matching(inst, MatchObjective::Sum)?;
    let mut red = vec![false; inst.point_count()];
    for e in hat.edges() {
        red[e.u.0] = true;
        red[e.v.0] = true;
    }
    let (r, b): (Vec<PointId>, Vec<PointId>) = inst.points().partition(|p| red[p.0]);
    let coloring = Coloring::new(r, b);
    if !inst.is_feasible(&coloring) {
        return Err(Error::internal("one-of-pair matching did not pick one point per pair"));
    }
    let blue = exact_min_weight_perfect_matching(coloring.blue(), inst, &[])?;
    Ok(MatchReport::new(coloring, hat, blue, guarantee_factor))
}

/// Red is the point set of the cheapest one-of-pair matching.
pub fn minsum_2matching(inst: &PairInstance) -> Result<MatchReport> {
    split_by_one_of_pair(inst, 2.0)
}

/// Same coloring as [`minsum_2matching`].
pub fn minmax_2matching(inst: &PairInstance) -> Result<MatchReport> {
    split_by_one_of_pair(inst, 3.0)
}

/// Shared result of the bottleneck pipeline, exposing the factor stages.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BottleneckMatching {
    pub report: MatchReport,
    pub initial: TwoFactor,
    pub merged: Option<TwoFactor>,
}

/// 2-factor, merge when some cycle is odd, then 2-color; each side's
/// matching is its links. Exact when no merge was needed.
pub fn bottleneck_2matching_detailed(inst: &PairInstance) -> Result<BottleneckMatching> {
    let initial = pair_2factor(inst)?;
    let merged = if initial.odd_cycle_count() > 0 { Some(merge_odd_cycles(&initial, inst)?) } else { None };
    let last = merged.as_ref().unwrap_or(&initial);
    let coloring = color_cycles(last)?;
    if !inst.is_feasible(&coloring) {
        return Err(Error::internal("cycle coloring is not feasible"));
    }
    let (mut red, mut blue) = (Vec::new(), Vec::new());
    for link in last.links() {
        match coloring.color_of(link.edge.u) {
            Some(c) if coloring.color_of(link.edge.v) == Some(c) => {
                if c == Color::Red {
                    red.push(link.edge);
                } else {
                    blue.push(link.edge);
                }
            }
            _ => return Err(Error::internal("a link joins two colors")),
        }
    }
    let guarantee = if merged.is_some() { 3.0 } else { 1.0 };
    let report = MatchReport::new(coloring, Matching::new(red), Matching::new(blue), guarantee);
    Ok(BottleneckMatching { report, initial, merged })
}

pub fn bottleneck_2matching(inst: &PairInstance) -> Result<MatchReport> {
    Ok(bottleneck_2matching_detailed(inst)?.report)
}
