//! Colorings for the 2-TSP objectives.
//!
//! Min-sum enumerates every alternating coloring obtained by cutting an
//! approximate tour of all points in an even number of places, adds one
//! random feasible coloring and keeps the cheapest. Min-max reports the same
//! coloring. Bottleneck folds the two paths of the metric bottleneck 2-MST
//! algorithm into cycles.

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{christofides_tour, double_tree_tour, exact_tsp, fold_path_to_cycle, Tour};
use crate::instance::{Coloring, PairInstance, PointId};
use crate::two_mst::bottleneck_2mst_metric;

/// Approximate tour routine used for every tour the algorithm builds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TourSubroutine {
    /// Double tree on pseudometric matrices, Christofides otherwise.
    #[default]
    Auto,
    Christofides,
    DoubleTree,
    Exact,
}

impl TourSubroutine {
    pub fn resolve(self, inst: &PairInstance) -> TourSubroutine {
        match self {
            TourSubroutine::Auto if inst.metric().is_pseudometric() => TourSubroutine::DoubleTree,
            TourSubroutine::Auto => TourSubroutine::Christofides,
            other => other,
        }
    }

    /// Worst-case ratio of the resolved routine.
    pub fn factor(self) -> f64 {
        match self {
            TourSubroutine::Exact => 1.0,
            TourSubroutine::Christofides | TourSubroutine::Auto => 1.5,
            TourSubroutine::DoubleTree => 2.0,
        }
    }

    pub fn tour(self, points: &[PointId], inst: &PairInstance) -> Result<Tour> {
        match self {
            TourSubroutine::Exact => exact_tsp(points, inst),
            TourSubroutine::DoubleTree => double_tree_tour(points, inst),
            TourSubroutine::Christofides | TourSubroutine::Auto => christofides_tour(points, inst),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TspParams {
    pub mu: f64,
    pub beta: f64,
    pub cap_k: Option<usize>,
    pub seed: u64,
    pub subroutine: TourSubroutine,
}

impl Default for TspParams {
    fn default() -> Self {
        TspParams { mu: 1.0 / 12.0, beta: 1.5, cap_k: None, seed: 0, subroutine: TourSubroutine::Auto }
    }
}

impl TspParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0 && self.mu < 0.25) {
            return Err(Error::usage(format!("mu must lie in (0, 1/4), got {}", self.mu)));
        }
        if !(self.beta > 1.0 && self.beta.is_finite()) {
            return Err(Error::usage(format!("beta must exceed 1, got {}", self.beta)));
        }
        if let Some(cap) = self.cap_k {
            let two_k = self.two_k();
            if cap < 2 || cap % 2 == 1 || cap > two_k {
                return Err(Error::usage(format!("cap-k must be even and within [2, {two_k}], got {cap}")));
            }
        }
        Ok(())
    }

    /// Largest even number not above `(2 + 1/mu) * beta`.
    pub fn two_k(&self) -> usize {
        let bound = ((2.0 + 1.0 / self.mu) * self.beta + 1e-9).floor() as usize;
        bound - bound % 2
    }

    pub fn cut_limit(&self) -> usize {
        self.cap_k.unwrap_or_else(|| self.two_k())
    }

    /// `max(1/(4mu), 2/(1-4mu))`, which is 3 at the default `mu`.
    pub fn separation_factor(&self) -> f64 {
        (1.0 / (4.0 * self.mu)).max(2.0 / (1.0 - 4.0 * self.mu))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TspReport {
    pub coloring: Coloring,
    pub red_tour: Tour,
    pub blue_tour: Tour,
    pub sum: f64,
    pub max: f64,
    pub bottleneck: f64,
    /// `None` when the configuration voids the guarantee.
    pub guarantee_factor: Option<f64>,
    pub enumerated_count: usize,
}

impl TspReport {
    fn new(
        coloring: Coloring,
        red_tour: Tour,
        blue_tour: Tour,
        guarantee_factor: Option<f64>,
        enumerated_count: usize,
    ) -> Self {
        TspReport {
            sum: red_tour.cost() + blue_tour.cost(),
            max: red_tour.cost().max(blue_tour.cost()),
            bottleneck: red_tour.bottleneck().max(blue_tour.bottleneck()),
            coloring,
            red_tour,
            blue_tour,
            guarantee_factor,
            enumerated_count,
        }
    }
}

/// Colorings from cutting `tour` at `2j` edges, `2j <= min(max_cuts, |tour|)`,
/// coloring arcs alternately with the arc holding point 0 red. Infeasible
/// colorings are skipped; each cut set gives a distinct coloring.
pub fn tour_decomposition_colorings<'a>(
    inst: &'a PairInstance,
    tour: &'a Tour,
    max_cuts: usize,
) -> Result<impl Iterator<Item = Coloring> + Send + 'a> {
    if max_cuts < 2 || max_cuts % 2 == 1 {
        return Err(Error::usage(format!("cut count must be even and at least 2, got {max_cuts}")));
    }
    let len = tour.len();
    if len != inst.point_count() {
        return Err(Error::usage("decomposed tour must cover every point"));
    }
    let top = max_cuts.min(len - len % 2);
    let order = tour.order();
    Ok((2..=top).step_by(2).flat_map(move |cuts| {
        (0..len).combinations(cuts).filter_map(move |cut| {
            // Edge c joins positions c and c + 1; a position's arc parity is
            // the number of cuts before it.
            let mut parity = vec![false; len];
            let mut next = 0;
            let mut odd = false;
            for (pos, slot) in parity.iter_mut().enumerate() {
                while next < cut.len() && cut[next] < pos {
                    odd = !odd;
                    next += 1;
                }
                *slot = odd;
            }
            let mut red_side = vec![false; len];
            for (pos, &p) in order.iter().enumerate() {
                red_side[p.0] = !parity[pos];
            }
            if !red_side[0] {
                red_side.iter_mut().for_each(|r| *r = !*r);
            }
            if inst.pairs().iter().any(|&(p, q)| red_side[p.0] == red_side[q.0]) {
                return None;
            }
            let (red, blue): (Vec<PointId>, Vec<PointId>) = inst.points().partition(|p| red_side[p.0]);
            Some(Coloring::new(red, blue))
        })
    }))
}

fn random_coloring(inst: &PairInstance, seed: u64) -> Coloring {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let choices: Vec<bool> = (0..inst.pair_count()).map(|_| rng.gen_bool(0.5)).collect();
    Coloring::from_choices(inst, &choices)
}

struct Candidate {
    coloring: Coloring,
    red: Tour,
    blue: Tour,
}

impl Candidate {
    fn sum(&self) -> f64 {
        self.red.cost() + self.blue.cost()
    }

    fn evaluate(coloring: Coloring, routine: TourSubroutine, inst: &PairInstance) -> Result<Candidate> {
        let red = routine.tour(coloring.red(), inst)?;
        let blue = routine.tour(coloring.blue(), inst)?;
        Ok(Candidate { coloring, red, blue })
    }

    /// Smaller sum wins; ties go to the smaller coloring.
    fn better(a: Candidate, b: Candidate) -> Candidate {
        match a.sum().total_cmp(&b.sum()).then_with(|| a.coloring.cmp(&b.coloring)) {
            std::cmp::Ordering::Greater => b,
            _ => a,
        }
    }
}

fn pick_best<I>(candidates: I) -> Result<Option<Candidate>>
where
    I: ParallelIterator<Item = Result<Candidate>>,
{
    candidates.try_reduce_with(|a, b| Ok(Candidate::better(a, b))).transpose()
}

/// Void under an explicit cap, or when the routine's ratio calls for more
/// cuts than were enumerated on a tour of `tour_len` edges.
fn tour_guarantee(params: &TspParams, routine: TourSubroutine, tour_len: usize, multiplier: f64) -> Option<f64> {
    let capped = params.cap_k.is_some_and(|cap| cap < params.two_k());
    let needed = TspParams { beta: params.beta.max(routine.factor()), ..params.clone() }.two_k();
    let usable = tour_len - tour_len % 2;
    let truncated = params.two_k().min(usable) < needed.min(usable);
    (!capped && !truncated).then(|| multiplier * params.separation_factor() * routine.factor())
}

fn minsum_candidate(inst: &PairInstance, params: &TspParams) -> Result<(Candidate, usize, TourSubroutine)> {
    params.validate()?;
    let routine = params.subroutine.resolve(inst);
    let all: Vec<PointId> = inst.points().collect();
    let whole = routine.tour(&all, inst)?;
    let decompositions = tour_decomposition_colorings(inst, &whole, params.cut_limit())?;
    let counter = std::sync::atomic::AtomicUsize::new(0);
    let enumerated = decompositions.par_bridge().map(|c| {
        counter.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        Candidate::evaluate(c, routine, inst)
    });
    let best = pick_best(enumerated)?;
    let random = Candidate::evaluate(random_coloring(inst, params.seed), routine, inst)?;
    let best = match best {
        Some(b) => Candidate::better(b, random),
        None => random,
    };
    Ok((best, counter.into_inner(), routine))
}

/// Best coloring over tour decompositions plus one seeded random coloring.
pub fn minsum_2tsp(inst: &PairInstance, params: &TspParams) -> Result<TspReport> {
    let (best, count, routine) = minsum_candidate(inst, params)?;
    let g = tour_guarantee(params, routine, inst.point_count(), 1.0);
    Ok(TspReport::new(best.coloring, best.red, best.blue, g, count))
}

/// The min-sum coloring judged by its larger tour.
pub fn minmax_2tsp(inst: &PairInstance, params: &TspParams) -> Result<TspReport> {
    let (best, count, routine) = minsum_candidate(inst, params)?;
    let g = tour_guarantee(params, routine, inst.point_count(), 2.0);
    Ok(TspReport::new(best.coloring, best.red, best.blue, g, count))
}

/// Folds the two bottleneck paths into cycles.
pub fn bottleneck_2tsp(inst: &PairInstance) -> Result<TspReport> {
    let paths = bottleneck_2mst_metric(inst)?;
    let red = fold_path_to_cycle(&paths.red_path, inst);
    let blue = fold_path_to_cycle(&paths.blue_path, inst);
    Ok(TspReport::new(paths.report.coloring, red, blue, Some(18.0), 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{DistanceMatrix, MetricSpace};

    fn square() -> PairInstance {
        // (p1, q1) and (p2, q2) are the vertical sides of a unit square.
        PairInstance::with_canonical_pairs(MetricSpace::Euclidean2d(vec![
            [0.0, 0.0],
            [0.0, 1.0],
            [1.0, 0.0],
            [1.0, 1.0],
        ]))
        .unwrap()
    }

    #[test]
    fn two_k_at_defaults_is_twenty() {
        let p = TspParams::default();
        assert_eq!(p.two_k(), 20);
        assert!((p.separation_factor() - 3.0).abs() < 1e-12);
        assert!(TspParams { cap_k: Some(3), ..p.clone() }.validate().is_err());
        assert!(TspParams { cap_k: Some(22), ..p.clone() }.validate().is_err());
        assert!(TspParams { mu: 0.3, ..p }.validate().is_err());
    }

    #[test]
    fn square_decompositions_cover_both_colorings() {
        let inst = square();
        let all: Vec<PointId> = inst.points().collect();
        let tour = exact_tsp(&all, &inst).unwrap();
        let found: Vec<Coloring> = tour_decomposition_colorings(&inst, &tour, 4).unwrap().collect();
        let mut want =
            vec![Coloring::from_choices(&inst, &[true, true]), Coloring::from_choices(&inst, &[true, false])];
        want.sort();
        let mut got = found.clone();
        got.sort();
        assert_eq!(got, want);
        assert!(tour_decomposition_colorings(&inst, &tour, 3).is_err());
    }

    #[test]
    fn square_minsum_and_minmax() {
        let inst = square();
        let r = minsum_2tsp(&inst, &TspParams::default()).unwrap();
        assert_eq!(r.sum, 4.0);
        assert_eq!(r.coloring.red(), &[PointId(0), PointId(2)]);
        assert_eq!(r.guarantee_factor, Some(4.5));
        let r = minmax_2tsp(&inst, &TspParams::default()).unwrap();
        assert_eq!(r.max, 2.0);
        assert_eq!(r.red_tour.cost(), r.blue_tour.cost());
        assert_eq!(r.guarantee_factor, Some(9.0));
    }

    #[test]
    fn cap_voids_guarantee() {
        let inst = square();
        let p = TspParams { cap_k: Some(4), ..TspParams::default() };
        assert_eq!(minsum_2tsp(&inst, &p).unwrap().guarantee_factor, None);
    }

    #[test]
    fn pseudometric_uses_double_tree() {
        let mut m = DistanceMatrix::new(4, 1.0);
        m.set_symmetric(0, 2, 0.0);
        let inst =
            PairInstance::new(MetricSpace::Matrix { matrix: m, pseudometric: true }, vec![(0, 1), (2, 3)]).unwrap();
        let r = minsum_2tsp(&inst, &TspParams { beta: 2.0, ..TspParams::default() }).unwrap();
        assert_eq!(r.guarantee_factor, Some(6.0));
        // Twenty cuts already cover every cut set of a 4-edge tour.
        let r = minsum_2tsp(&inst, &TspParams::default()).unwrap();
        assert_eq!(r.guarantee_factor, Some(6.0));
        let p = TspParams::default();
        assert_eq!(tour_guarantee(&p, TourSubroutine::DoubleTree, 20, 1.0), Some(6.0));
        assert_eq!(tour_guarantee(&p, TourSubroutine::DoubleTree, 22, 1.0), None);
        assert_eq!(tour_guarantee(&p, TourSubroutine::Christofides, 40, 2.0), Some(9.0));
    }

    #[test]
    fn bottleneck_on_square() {
        let r = bottleneck_2tsp(&square()).unwrap();
        assert!(r.bottleneck <= 18.0);
        assert_eq!(r.guarantee_factor, Some(18.0));
        assert!(square().is_feasible(&r.coloring));
    }
}
