//! Point-pair instances, colorings and metric validation.
//!
//! An instance is a finite metric space over `2n` points together with `n`
//! disjoint pairs that cover every point. A coloring is feasible when each
//! pair contributes exactly one point to the red side and one to the blue side.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack allowed when checking the triangle inequality.
pub const TRIANGLE_TOLERANCE: f64 = 1e-9;

/// Index of a point in `[0, 2n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub usize);

impl PointId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<usize> for PointId {
    fn from(value: usize) -> Self {
        PointId(value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Blue,
}

impl Color {
    pub fn flip(self) -> Self {
        match self {
            Color::Red => Color::Blue,
            Color::Blue => Color::Red,
        }
    }
}

/// Anything that can report a nonnegative length between two points.
pub trait Distance {
    fn dist(&self, a: PointId, b: PointId) -> f64;
}

impl<F: ?Sized> Distance for F
where
    F: Fn(PointId, PointId) -> f64,
{
    #[inline]
    fn dist(&self, a: PointId, b: PointId) -> f64 {
        self(a, b)
    }
}

/// Total order on weighted edges: weight first, then endpoint ids.
#[inline]
pub(crate) fn cmp_weighted(a: (f64, PointId, PointId), b: (f64, PointId, PointId)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
}

/// Dense square matrix of lengths. `f64::INFINITY` marks an absent entry
/// before closure.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn new(dim: usize, fill: f64) -> Self {
        let mut data = vec![fill; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 0.0;
        }
        DistanceMatrix { dim, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != dim) {
            return Err(Error::usage(format!(
                "matrix is not square: row {i} has {} entries, expected {dim}",
                row.len()
            )));
        }
        Ok(DistanceMatrix { dim, data: rows.iter().flatten().copied().collect() })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
    }

    /// Sets both `(i, j)` and `(j, i)`.
    pub fn set_symmetric(&mut self, i: usize, j: usize, value: f64) {
        self.set(i, j, value);
        self.set(j, i, value);
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim.max(1)).take(self.dim).map(<[f64]>::to_vec).collect()
    }

    fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (i + 1..self.dim).all(|j| self.get(i, j) == self.get(j, i)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Euclidean2d,
    Line1d,
    Matrix,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Euclidean2d => "euclidean2d",
            MetricKind::Line1d => "line1d",
            MetricKind::Matrix => "matrix",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MetricSpace {
    Euclidean2d(Vec<[f64; 2]>),
    Line1d(Vec<f64>),
    Matrix { matrix: DistanceMatrix, pseudometric: bool },
}

impl MetricSpace {
    pub fn kind(&self) -> MetricKind {
        match self {
            MetricSpace::Euclidean2d(_) => MetricKind::Euclidean2d,
            MetricSpace::Line1d(_) => MetricKind::Line1d,
            MetricSpace::Matrix { .. } => MetricKind::Matrix,
        }
    }

    pub fn point_count(&self) -> usize {
        match self {
            MetricSpace::Euclidean2d(pts) => pts.len(),
            MetricSpace::Line1d(xs) => xs.len(),
            MetricSpace::Matrix { matrix, .. } => matrix.dim(),
        }
    }

    pub fn is_pseudometric(&self) -> bool {
        matches!(self, MetricSpace::Matrix { pseudometric: true, .. })
    }

    /// Unchecked lookup; panics on out-of-range indices like slice indexing.
    #[inline]
    pub fn length(&self, a: usize, b: usize) -> f64 {
        match self {
            MetricSpace::Euclidean2d(pts) => {
                let (p, q) = (pts[a], pts[b]);
                (p[0] - q[0]).hypot(p[1] - q[1])
            }
            MetricSpace::Line1d(xs) => (xs[a] - xs[b]).abs(),
            MetricSpace::Matrix { matrix, .. } => matrix.get(a, b),
        }
    }
}

/// One problem found by [`validate_instance`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    NoPairs,
    OddPointCount {
        points: usize,
    },
    NonFinite {
        a: usize,
        b: usize,
    },
    Negative {
        a: usize,
        b: usize,
        length: f64,
    },
    NonZeroDiagonal {
        a: usize,
        length: f64,
    },
    Asymmetric {
        a: usize,
        b: usize,
    },
    ZeroDistance {
        a: usize,
        b: usize,
    },
    /// `d(a, c) > d(a, via) + d(via, c)` beyond tolerance.
    Triangle {
        a: usize,
        via: usize,
        c: usize,
    },
    PairOutOfRange {
        pair: usize,
        point: usize,
    },
    DegeneratePair {
        pair: usize,
    },
    PointInSeveralPairs {
        point: usize,
    },
    PointUncovered {
        point: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoPairs => write!(f, "instance has no pairs"),
            Violation::OddPointCount { points } => write!(f, "{points} points cannot form pairs"),
            Violation::NonFinite { a, b } => write!(f, "non-finite length at ({a}, {b})"),
            Violation::Negative { a, b, length } => write!(f, "negative length {length} at ({a}, {b})"),
            Violation::NonZeroDiagonal { a, length } => write!(f, "d({a}, {a}) = {length}"),
            Violation::Asymmetric { a, b } => write!(f, "d({a}, {b}) != d({b}, {a})"),
            Violation::ZeroDistance { a, b } => {
                write!(f, "d({a}, {b}) = 0 without the pseudometric flag")
            }
            Violation::Triangle { a, via, c } => {
                write!(f, "triangle inequality fails: d({a}, {c}) > d({a}, {via}) + d({via}, {c})")
            }
            Violation::PairOutOfRange { pair, point } => {
                write!(f, "pair {pair} references missing point {point}")
            }
            Violation::DegeneratePair { pair } => write!(f, "pair {pair} joins a point to itself"),
            Violation::PointInSeveralPairs { point } => {
                write!(f, "point {point} appears in more than one pair")
            }
            Violation::PointUncovered { point } => write!(f, "point {point} belongs to no pair"),
        }
    }
}

/// Checks the metric axioms and the pairing structure.
///
/// Coordinate metrics are only checked for finiteness. Zero off-diagonal
/// entries of a matrix are reported unless the pseudometric flag is set.
pub fn validate_instance(metric: &MetricSpace, pairs: &[(usize, usize)]) -> Vec<Violation> {
    let mut out = Vec::new();
    let m = metric.point_count();

    match metric {
        MetricSpace::Euclidean2d(pts) => {
            for (i, p) in pts.iter().enumerate() {
                if !(p[0].is_finite() && p[1].is_finite()) {
                    out.push(Violation::NonFinite { a: i, b: i });
                }
            }
        }
        MetricSpace::Line1d(xs) => {
            for (i, x) in xs.iter().enumerate() {
                if !x.is_finite() {
                    out.push(Violation::NonFinite { a: i, b: i });
                }
            }
        }
        MetricSpace::Matrix { matrix, pseudometric } => {
            check_matrix(matrix, *pseudometric, &mut out);
        }
    }

    if pairs.is_empty() {
        out.push(Violation::NoPairs);
    }
    if m % 2 == 1 {
        out.push(Violation::OddPointCount { points: m });
    }
    let mut owner: Vec<Option<usize>> = vec![None; m];
    let mut repeated = vec![false; m];
    for (idx, &(a, b)) in pairs.iter().enumerate() {
        if a == b {
            out.push(Violation::DegeneratePair { pair: idx });
        }
        for point in [a, b] {
            if point >= m {
                out.push(Violation::PairOutOfRange { pair: idx, point });
                continue;
            }
            match owner[point] {
                Some(_) if !repeated[point] => {
                    repeated[point] = true;
                    out.push(Violation::PointInSeveralPairs { point });
                }
                Some(_) => {}
                None => owner[point] = Some(idx),
            }
        }
    }
    for (point, o) in owner.iter().enumerate() {
        if o.is_none() {
            out.push(Violation::PointUncovered { point });
        }
    }
    out
}

fn check_matrix(matrix: &DistanceMatrix, pseudometric: bool, out: &mut Vec<Violation>) {
    let m = matrix.dim();
    let mut entries_ok = true;
    for a in 0..m {
        let diag = matrix.get(a, a);
        if diag != 0.0 {
            out.push(Violation::NonZeroDiagonal { a, length: diag });
            entries_ok = false;
        }
        for b in a + 1..m {
            let (ab, ba) = (matrix.get(a, b), matrix.get(b, a));
            if !(ab.is_finite() && ba.is_finite()) {
                out.push(Violation::NonFinite { a, b });
                entries_ok = false;
                continue;
            }
            if ab < 0.0 || ba < 0.0 {
                out.push(Violation::Negative { a, b, length: ab.min(ba) });
                entries_ok = false;
            }
            if ab != ba {
                out.push(Violation::Asymmetric { a, b });
                entries_ok = false;
            }
            if !pseudometric && (ab == 0.0 || ba == 0.0) {
                out.push(Violation::ZeroDistance { a, b });
            }
        }
    }
    if !entries_ok {
        return;
    }
    for a in 0..m {
        for c in a + 1..m {
            let direct = matrix.get(a, c);
            for via in 0..m {
                if via == a || via == c {
                    continue;
                }
                let detour = matrix.get(a, via) + matrix.get(via, c);
                if direct > detour + TRIANGLE_TOLERANCE * direct.max(detour) {
                    out.push(Violation::Triangle { a, via, c });
                }
            }
        }
    }
}

/// All-pairs shortest paths over a symmetric matrix whose missing entries
/// are `f64::INFINITY`.
pub fn metric_closure(m: &DistanceMatrix) -> Result<DistanceMatrix> {
    let n = m.dim();
    for i in 0..n {
        if m.get(i, i) != 0.0 {
            return Err(Error::usage(format!("diagonal entry {i} is not zero")));
        }
        for j in 0..n {
            let v = m.get(i, j);
            if v.is_nan() || v < 0.0 {
                return Err(Error::usage(format!("entry ({i}, {j}) is negative or NaN")));
            }
        }
    }
    if !m.is_symmetric() {
        return Err(Error::usage("matrix is not symmetric"));
    }
    let mut d = m.clone();
    // Rounding can leave a one-ulp violation after a single sweep; repeat
    // until every triangle holds exactly in floating point.
    let mut changed = true;
    while changed {
        changed = false;
        for k in 0..n {
            for i in 0..n {
                let dik = d.get(i, k);
                if dik.is_infinite() {
                    continue;
                }
                for j in 0..n {
                    let through = dik + d.get(k, j);
                    if through < d.get(i, j) {
                        d.set(i, j, through);
                        changed = true;
                    }
                }
            }
        }
    }
    Ok(d)
}

/// A metric space with `n` disjoint pairs covering all `2n` points.
#[derive(Clone, Debug, PartialEq)]
pub struct PairInstance {
    metric: MetricSpace,
    pairs: Vec<(PointId, PointId)>,
    partner: Vec<PointId>,
    pair_of: Vec<usize>,
}

impl PairInstance {
    /// Builds an instance, rejecting anything [`validate_instance`] objects to.
    pub fn new(metric: MetricSpace, pairs: Vec<(usize, usize)>) -> Result<Self> {
        let violations = validate_instance(&metric, &pairs);
        if !violations.is_empty() {
            return Err(Error::InvalidInstance(violations));
        }
        let m = metric.point_count();
        let mut partner = vec![PointId(0); m];
        let mut pair_of = vec![0; m];
        for (idx, &(a, b)) in pairs.iter().enumerate() {
            partner[a] = PointId(b);
            partner[b] = PointId(a);
            pair_of[a] = idx;
            pair_of[b] = idx;
        }
        Ok(PairInstance {
            metric,
            pairs: pairs.into_iter().map(|(a, b)| (PointId(a), PointId(b))).collect(),
            partner,
            pair_of,
        })
    }

    /// Pairs point `2i` with point `2i + 1`.
    pub fn with_canonical_pairs(metric: MetricSpace) -> Result<Self> {
        let pairs = (0..metric.point_count() / 2).map(|i| (2 * i, 2 * i + 1)).collect();
        Self::new(metric, pairs)
    }

    #[inline]
    pub fn metric(&self) -> &MetricSpace {
        &self.metric
    }

    #[inline]
    pub fn kind(&self) -> MetricKind {
        self.metric.kind()
    }

    #[inline]
    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    #[inline]
    pub fn point_count(&self) -> usize {
        self.partner.len()
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> + '_ {
        (0..self.point_count()).map(PointId)
    }

    #[inline]
    pub fn pairs(&self) -> &[(PointId, PointId)] {
        &self.pairs
    }

    #[inline]
    pub fn partner(&self, p: PointId) -> PointId {
        self.partner[p.0]
    }

    #[inline]
    pub fn pair_of(&self, p: PointId) -> usize {
        self.pair_of[p.0]
    }

    #[inline]
    pub fn is_pair(&self, a: PointId, b: PointId) -> bool {
        a != b && self.partner[a.0] == b
    }

    /// Length between two points, rejecting out-of-range ids.
    pub fn distance(&self, a: PointId, b: PointId) -> Result<f64> {
        let m = self.point_count();
        if a.0 >= m || b.0 >= m {
            return Err(Error::usage(format!("point id out of range: ({a}, {b}) with {m} points")));
        }
        Ok(self.metric.length(a.0, b.0))
    }

    /// Coordinate of a point when the metric is a line.
    pub fn line_coordinate(&self, p: PointId) -> Option<f64> {
        match &self.metric {
            MetricSpace::Line1d(xs) => Some(xs[p.0]),
            _ => None,
        }
    }

    pub fn is_feasible(&self, coloring: &Coloring) -> bool {
        is_feasible(self, coloring)
    }
}

impl Distance for PairInstance {
    #[inline]
    fn dist(&self, a: PointId, b: PointId) -> f64 {
        self.metric.length(a.0, b.0)
    }
}

/// A red/blue split of the points. Both sides are kept sorted.
///
/// Orders lexicographically by the red list, which is the tie-break used
/// throughout the solvers.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Coloring {
    red: Vec<PointId>,
    blue: Vec<PointId>,
}

impl Coloring {
    pub fn new(red: impl IntoIterator<Item = PointId>, blue: impl IntoIterator<Item = PointId>) -> Self {
        let mut red: Vec<PointId> = red.into_iter().collect();
        let mut blue: Vec<PointId> = blue.into_iter().collect();
        red.sort_unstable();
        blue.sort_unstable();
        Coloring { red, blue }
    }

    pub fn from_sides(sides: &[Color]) -> Self {
        let mut red = Vec::with_capacity(sides.len() / 2);
        let mut blue = Vec::with_capacity(sides.len() / 2);
        for (i, side) in sides.iter().enumerate() {
            match side {
                Color::Red => red.push(PointId(i)),
                Color::Blue => blue.push(PointId(i)),
            }
        }
        Coloring { red, blue }
    }

    /// `choices[i]` tells whether the first point of pair `i` is red.
    pub fn from_choices(inst: &PairInstance, choices: &[bool]) -> Self {
        let mut sides = vec![Color::Blue; inst.point_count()];
        for (&(p, q), &first_red) in inst.pairs().iter().zip(choices) {
            let (r, b) = if first_red { (p, q) } else { (q, p) };
            sides[r.0] = Color::Red;
            sides[b.0] = Color::Blue;
        }
        Coloring::from_sides(&sides)
    }

    #[inline]
    pub fn red(&self) -> &[PointId] {
        &self.red
    }

    #[inline]
    pub fn blue(&self) -> &[PointId] {
        &self.blue
    }

    pub fn side(&self, color: Color) -> &[PointId] {
        match color {
            Color::Red => &self.red,
            Color::Blue => &self.blue,
        }
    }

    pub fn color_of(&self, p: PointId) -> Option<Color> {
        if self.red.binary_search(&p).is_ok() {
            Some(Color::Red)
        } else if self.blue.binary_search(&p).is_ok() {
            Some(Color::Blue)
        } else {
            None
        }
    }

    pub fn swapped(&self) -> Self {
        Coloring { red: self.blue.clone(), blue: self.red.clone() }
    }
}

/// True iff the coloring partitions the instance's points with exactly one
/// point of every pair on each side.
pub fn is_feasible(inst: &PairInstance, coloring: &Coloring) -> bool {
    let m = inst.point_count();
    let mut sides: Vec<Option<Color>> = vec![None; m];
    for (list, color) in [(&coloring.red, Color::Red), (&coloring.blue, Color::Blue)] {
        for p in list.iter() {
            if p.0 >= m || sides[p.0].is_some() {
                return false;
            }
            sides[p.0] = Some(color);
        }
    }
    inst.pairs().iter().all(|&(p, q)| match (sides[p.0], sides[q.0]) {
        (Some(a), Some(b)) => a != b,
        _ => false,
    })
}
