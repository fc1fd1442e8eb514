//! The 2-factor formed by a bottleneck matching plus the pair edges, merging
//! of cycles that hold an odd number of pairs, and the final 2-coloring.

use std::collections::BTreeMap;

use serde::Serialize;

use super::collapsed::{one_of_pair_matching, MatchObjective};
use crate::error::{Error, Result};
use crate::graph::{bottleneck_perfect_matching, Edge, UnionFind};
use crate::instance::{Color, Coloring, Distance, PairInstance, PointId};

/// Relative slack on the stitched-link weight check.
const STITCH_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "origin", rename_all = "snake_case")]
pub enum LinkOrigin {
    /// An edge of the bottleneck matching over all points.
    Matching,
    /// Created while merging; `via` is a walk of at most three matching
    /// edges between the endpoints.
    Stitched { via: Vec<Edge> },
}

/// A non-pair cycle edge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Link {
    pub edge: Edge,
    #[serde(flatten)]
    pub origin: LinkOrigin,
}

/// `order[2i]-order[2i+1]` are pair edges; `order[2i+1]-order[2i+2]`
/// (wrapping) are links. Starts at the minimum id.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorCycle {
    pub order: Vec<PointId>,
    pub links: Vec<Link>,
}

impl FactorCycle {
    pub fn pair_count(&self) -> usize {
        self.order.len() / 2
    }

    pub fn max_link(&self) -> f64 {
        self.links.iter().map(|l| l.edge.w).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoFactor {
    pub cycles: Vec<FactorCycle>,
}

impl TwoFactor {
    pub fn odd_cycle_count(&self) -> usize {
        self.cycles.iter().filter(|c| c.pair_count() % 2 == 1).count()
    }

    pub fn links(&self) -> impl Iterator<Item = &Link> {
        self.cycles.iter().flat_map(|c| c.links.iter())
    }

    /// Checks degree two everywhere, alternation of pair edges and links,
    /// and that every pair sits inside exactly one cycle.
    pub fn check_structure(&self, inst: &PairInstance) -> Result<()> {
        let m = inst.point_count();
        let mut seen = vec![false; m];
        for cycle in &self.cycles {
            let o = &cycle.order;
            if o.len() < 4 || o.len() % 2 == 1 || cycle.links.len() != o.len() / 2 {
                return Err(Error::internal("cycle has the wrong shape"));
            }
            for (i, &p) in o.iter().enumerate() {
                if p.0 >= m || std::mem::replace(&mut seen[p.0], true) {
                    return Err(Error::internal(format!("point {p} appears twice in the 2-factor")));
                }
                let next = o[(i + 1) % o.len()];
                if (i % 2 == 0) != inst.is_pair(p, next) {
                    return Err(Error::internal(format!("edges do not alternate at {p}")));
                }
            }
            for (i, link) in cycle.links.iter().enumerate() {
                if Edge::new(o[2 * i + 1], o[(2 * i + 2) % o.len()], link.edge.w) != link.edge {
                    return Err(Error::internal("link list out of step with cycle order"));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::internal("2-factor misses a point"));
        }
        Ok(())
    }
}

/// Mutable form: `link[p]` is the link partner of `p`.
struct LinkTable {
    link: Vec<PointId>,
    origin: BTreeMap<(PointId, PointId), LinkOrigin>,
}

fn key(a: PointId, b: PointId) -> (PointId, PointId) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl LinkTable {
    fn from_factor(f: &TwoFactor, m: usize) -> Self {
        let mut link = vec![PointId(usize::MAX); m];
        let mut origin = BTreeMap::new();
        for l in f.links() {
            link[l.edge.u.0] = l.edge.v;
            link[l.edge.v.0] = l.edge.u;
            origin.insert((l.edge.u, l.edge.v), l.origin.clone());
        }
        LinkTable { link, origin }
    }

    fn connect(&mut self, a: PointId, b: PointId, origin: LinkOrigin) {
        self.link[a.0] = b;
        self.link[b.0] = a;
        self.origin.insert(key(a, b), origin);
    }

    fn cut(&mut self, a: PointId, b: PointId) {
        self.origin.remove(&key(a, b));
    }

    fn into_factor(self, inst: &PairInstance) -> Result<TwoFactor> {
        let m = inst.point_count();
        let mut seen = vec![false; m];
        let mut cycles = Vec::new();
        for start in inst.points() {
            if seen[start.0] {
                continue;
            }
            let mut order = Vec::new();
            let mut links = Vec::new();
            let mut p = start;
            loop {
                let q = inst.partner(p);
                let next = self.link[q.0];
                if seen[p.0] || seen[q.0] || next.0 >= m {
                    return Err(Error::internal("links do not form a 2-factor"));
                }
                seen[p.0] = true;
                seen[q.0] = true;
                order.push(p);
                order.push(q);
                let origin = self
                    .origin
                    .get(&key(q, next))
                    .cloned()
                    .ok_or_else(|| Error::internal("link without a recorded origin"))?;
                links.push(Link { edge: Edge::measured(q, next, inst), origin });
                if next == start {
                    break;
                }
                p = next;
            }
            cycles.push(FactorCycle { order, links });
        }
        Ok(TwoFactor { cycles })
    }
}

fn require_even(inst: &PairInstance) -> Result<()> {
    let n = inst.pair_count();
    if n % 2 == 1 {
        return Err(Error::infeasible(format!("2-matching requires an even number of pairs, got {n}")));
    }
    Ok(())
}

/// Union of the pair edges with a bottleneck perfect matching that avoids
/// them, split into its alternating cycles.
pub fn pair_2factor(inst: &PairInstance) -> Result<TwoFactor> {
    require_even(inst)?;
    let all: Vec<PointId> = inst.points().collect();
    let matching = bottleneck_perfect_matching(&all, inst, inst.pairs())?;
    let mut table = LinkTable { link: vec![PointId(usize::MAX); all.len()], origin: BTreeMap::new() };
    for e in matching.edges() {
        table.connect(e.u, e.v, LinkOrigin::Matching);
    }
    table.into_factor(inst)
}

/// A maximal walk `u1 -e1- v1 -f1- u2 -e2- … -ek- vk` alternating links and
/// one-of-pair edges, across `k >= 2` distinct cycles.
struct AlternatingPath {
    us: Vec<PointId>,
    vs: Vec<PointId>,
    fs: Vec<Edge>,
}

impl AlternatingPath {
    fn smallest_bridge(&self) -> Edge {
        *self.fs.iter().min_by(|a, b| a.cmp_key(b)).expect("path has a bridge")
    }
}

/// Merges cycles so that every cycle holds an even number of pairs.
///
/// Cross-cycle edges of the bottleneck one-of-pair matching are filtered
/// through Kruskal over cycles. Forest components that contain an odd cycle
/// are merged by stitching each maximal alternating path: odd-indexed
/// cycles forward, even-indexed ones back. Every created link records a walk
/// of at most three original edges, and its weight is checked against three
/// times the larger of the two matching bottlenecks.
pub fn merge_odd_cycles(f: &TwoFactor, inst: &PairInstance) -> Result<TwoFactor> {
    require_even(inst)?;
    if f.odd_cycle_count() == 0 {
        return Ok(f.clone());
    }
    let m = inst.point_count();
    let mut cycle_of = vec![usize::MAX; m];
    for (c, cycle) in f.cycles.iter().enumerate() {
        for p in &cycle.order {
            cycle_of[p.0] = c;
        }
    }
    let hat = one_of_pair_matching(inst, MatchObjective::Bottleneck)?;
    let base_neck = f.links().map(|l| l.edge.w).fold(0.0, f64::max);
    let lower_bound = base_neck.max(hat.bottleneck());

    let mut cross: Vec<Edge> = hat.edges().iter().filter(|e| cycle_of[e.u.0] != cycle_of[e.v.0]).copied().collect();
    cross.sort_by(Edge::cmp_key);
    let mut uf = UnionFind::new(f.cycles.len());
    let forest: Vec<Edge> = cross.into_iter().filter(|e| uf.union(cycle_of[e.u.0], cycle_of[e.v.0])).collect();
    let mut odd_root = vec![false; f.cycles.len()];
    for (c, cycle) in f.cycles.iter().enumerate() {
        if cycle.pair_count() % 2 == 1 {
            odd_root[uf.find(c)] = true;
        }
    }
    let mut bridge: Vec<Option<(PointId, Edge)>> = vec![None; m];
    for e in forest {
        if odd_root[uf.find(cycle_of[e.u.0])] {
            bridge[e.u.0] = Some((e.v, e));
            bridge[e.v.0] = Some((e.u, e));
        }
    }

    let mut table = LinkTable::from_factor(f, m);
    let mut visited = vec![false; m];
    let mut paths = Vec::new();
    for start in inst.points() {
        if visited[start.0] || bridge[start.0].is_some() {
            continue;
        }
        let mut path = AlternatingPath { us: Vec::new(), vs: Vec::new(), fs: Vec::new() };
        let mut a = start;
        loop {
            let b = table.link[a.0];
            visited[a.0] = true;
            visited[b.0] = true;
            path.us.push(a);
            path.vs.push(b);
            match bridge[b.0] {
                Some((c, e)) => {
                    path.fs.push(e);
                    a = c;
                }
                None => break,
            }
        }
        if !path.fs.is_empty() {
            paths.push(path);
        }
    }
    paths.sort_by(|a, b| a.smallest_bridge().cmp_key(&b.smallest_bridge()));

    for path in &paths {
        stitch(&mut table, path, inst);
    }
    let merged = table.into_factor(inst)?;

    if merged.odd_cycle_count() != 0 {
        return Err(Error::internal("merging left a cycle with an odd number of pairs"));
    }
    let limit = 3.0 * lower_bound * (1.0 + STITCH_TOLERANCE);
    for link in merged.links() {
        if let LinkOrigin::Stitched { via } = &link.origin {
            if via.is_empty() || via.len() > 3 || !is_walk(via, link.edge.u, link.edge.v) {
                return Err(Error::internal("stitched link has a malformed decomposition"));
            }
            if link.edge.w > limit || via.iter().any(|e| e.w > lower_bound * (1.0 + STITCH_TOLERANCE)) {
                return Err(Error::internal(format!(
                    "stitched link ({}, {}) weighs {} above 3 x {}",
                    link.edge.u, link.edge.v, link.edge.w, lower_bound
                )));
            }
        }
    }
    Ok(merged)
}

/// True when `via` is a walk between `a` and `b`, in either direction.
pub fn is_walk(via: &[Edge], a: PointId, b: PointId) -> bool {
    walks_from(via, a, b) || walks_from(via, b, a)
}

fn walks_from(via: &[Edge], a: PointId, b: PointId) -> bool {
    let mut at = a;
    for e in via {
        if !e.touches(at) {
            return false;
        }
        at = e.other(at);
    }
    at == b
}

fn stitch<D: Distance + ?Sized>(table: &mut LinkTable, path: &AlternatingPath, metric: &D) {
    let k = path.us.len();
    // 1-based accessors matching the walk labels.
    let u = |i: usize| path.us[i - 1];
    let v = |i: usize| path.vs[i - 1];
    let e = |i: usize| Edge::measured(u(i), v(i), metric);
    let f = |i: usize| path.fs[i - 1];
    for i in 1..=k {
        table.cut(u(i), v(i));
    }
    let mut join = |a: PointId, b: PointId, via: Vec<Edge>| table.connect(a, b, LinkOrigin::Stitched { via });
    for i in (1..=k).step_by(2).filter(|&i| i + 2 <= k) {
        join(v(i), u(i + 2), vec![f(i), e(i + 1), f(i + 1)]);
    }
    join(v(k - 1), v(k), vec![f(k - 1), e(k)]);
    for i in (4..=k).step_by(2) {
        join(u(i), v(i - 2), vec![f(i - 1), e(i - 1), f(i - 2)]);
    }
    join(u(2), u(1), vec![f(1), e(1)]);
}

/// Walks each cycle from its minimum id starting red, flipping across pair
/// edges and keeping the color across links.
pub fn color_cycles(f: &TwoFactor) -> Result<Coloring> {
    let m = f.cycles.iter().map(|c| c.order.len()).sum();
    let mut sides = vec![None; m];
    for cycle in &f.cycles {
        if cycle.pair_count() % 2 == 1 {
            return Err(Error::usage(format!("cycle through {} holds an odd number of pairs", cycle.order[0])));
        }
        for (i, &p) in cycle.order.iter().enumerate() {
            if p.0 >= m {
                return Err(Error::usage(format!("point {p} outside the 2-factor")));
            }
            sides[p.0] = Some(if matches!(i % 4, 0 | 3) { Color::Red } else { Color::Blue });
        }
    }
    let sides: Vec<Color> = sides
        .into_iter()
        .map(|s| s.ok_or_else(|| Error::usage("2-factor does not cover its points")))
        .collect::<Result<_>>()?;
    Ok(Coloring::from_sides(&sides))
}
