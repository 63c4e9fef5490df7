//! Piecewise-constant valuations on the cake `[0,1]` or the pie (the same
//! interval with its endpoints identified), and exact integration.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::linalg::RationalMatrix;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Geometry {
    Cake,
    Pie,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeasureError {
    #[error("point {0} lies outside [0,1]")]
    OutOfRange(Rational),
    #[error("cake interval [{start}, {end}] has start > end")]
    Reversed { start: Rational, end: Rational },
    #[error("breakpoints must start at 0, end at 1 and increase strictly")]
    BadBreakpoints,
    #[error("expected {expected} cell values, got {got}")]
    CellCount { expected: usize, got: usize },
    #[error("negative density {0}")]
    NegativeDensity(Rational),
    #[error("density integrates to {total}, deficit {deficit} from 1")]
    NotNormalized { total: Rational, deficit: Rational },
    #[error("density pieces overlap on [{0}, {1}]")]
    OverlappingPieces(Rational, Rational),
    #[error("intervals overlap on [{0}, {1}]")]
    InvalidSet(Rational, Rational),
    #[error("measures live on different geometries")]
    GeometryMismatch,
}

/// Closed interval of the cake, or closed arc of the pie.
///
/// A pie arc with `start > end` wraps through the identified point `0 ≡ 1`.
/// Arcs are canonical: the full circle is `[0,1]`, an arc ending at the
/// identified point is written `[s,1]`, and `start == end` is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    start: Rational,
    end: Rational,
    geometry: Geometry,
}

fn in_unit(x: &Rational) -> Result<(), MeasureError> {
    if x.is_negative() || *x > Rational::one() {
        Err(MeasureError::OutOfRange(x.clone()))
    } else {
        Ok(())
    }
}

impl Interval {
    pub fn new(geometry: Geometry, start: Rational, end: Rational) -> Result<Self, MeasureError> {
        in_unit(&start)?;
        in_unit(&end)?;
        match geometry {
            Geometry::Cake => {
                if start > end {
                    return Err(MeasureError::Reversed { start, end });
                }
                Ok(Interval { start, end, geometry })
            }
            Geometry::Pie => {
                if start.is_zero() && end.is_one() {
                    return Ok(Interval::full(Geometry::Pie));
                }
                let start = if start.is_one() { Rational::zero() } else { start };
                let end = if end.is_zero() && start.is_positive() { Rational::one() } else { end };
                Ok(Interval { start, end, geometry })
            }
        }
    }

    pub fn cake(start: Rational, end: Rational) -> Result<Self, MeasureError> {
        Self::new(Geometry::Cake, start, end)
    }

    pub fn full(geometry: Geometry) -> Self {
        Interval { start: Rational::zero(), end: Rational::one(), geometry }
    }

    /// Pie arc of the given length starting at `start` (taken mod 1).
    pub fn arc(start: &Rational, length: &Rational) -> Result<Self, MeasureError> {
        in_unit(length)?;
        if length.is_one() {
            return Ok(Interval::full(Geometry::Pie));
        }
        let s = frac(start);
        let e = frac(&(&s + length));
        Self::new(Geometry::Pie, s, e)
    }

    pub fn start(&self) -> &Rational {
        &self.start
    }

    pub fn end(&self) -> &Rational {
        &self.end
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn wraps(&self) -> bool {
        self.start > self.end
    }

    pub fn length(&self) -> Rational {
        if self.wraps() {
            Rational::one() - &self.start + &self.end
        } else {
            &self.end - &self.start
        }
    }

    /// The interval as one or two non-wrapping pieces of `[0,1]`.
    pub fn segments(&self) -> Vec<(Rational, Rational)> {
        if self.wraps() {
            vec![(self.start.clone(), Rational::one()), (Rational::zero(), self.end.clone())]
        } else {
            vec![(self.start.clone(), self.end.clone())]
        }
    }

    /// Length of the intersection with `other`.
    pub fn overlap_length(&self, other: &Interval) -> Rational {
        let mut total = Rational::zero();
        for (a, b) in self.segments() {
            for (c, d) in other.segments() {
                let lo = if a > c { &a } else { &c };
                let hi = if b < d { &b } else { &d };
                if hi > lo {
                    total += hi - lo;
                }
            }
        }
        total
    }

    pub fn contains_point(&self, x: &Rational) -> bool {
        self.segments().iter().any(|(a, b)| a <= x && x <= b)
    }
}

/// Fractional part, in `[0,1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// Normalized non-negative density, constant on each cell between
/// consecutive breakpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseConstantMeasure {
    geometry: Geometry,
    breakpoints: Vec<Rational>,
    values: Vec<Rational>,
    cumulative: Vec<Rational>,
}

impl PiecewiseConstantMeasure {
    pub fn new(geometry: Geometry, breakpoints: Vec<Rational>, values: Vec<Rational>) -> Result<Self, MeasureError> {
        let ok_ends = breakpoints.first().is_some_and(Zero::is_zero)
            && breakpoints.last().is_some_and(One::is_one)
            && breakpoints.len() >= 2;
        if !ok_ends || breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MeasureError::BadBreakpoints);
        }
        if values.len() + 1 != breakpoints.len() {
            return Err(MeasureError::CellCount { expected: breakpoints.len() - 1, got: values.len() });
        }
        if let Some(v) = values.iter().find(|v| v.is_negative()) {
            return Err(MeasureError::NegativeDensity(v.clone()));
        }
        let mut cumulative = Vec::with_capacity(breakpoints.len());
        let mut acc = Rational::zero();
        cumulative.push(acc.clone());
        for (w, v) in breakpoints.windows(2).zip(&values) {
            acc += v * (&w[1] - &w[0]);
            cumulative.push(acc.clone());
        }
        if !acc.is_one() {
            let deficit = Rational::one() - &acc;
            return Err(MeasureError::NotNormalized { total: acc, deficit });
        }
        Ok(PiecewiseConstantMeasure { geometry, breakpoints, values, cumulative })
    }

    /// Builds a density from `(interval, value)` pieces; gaps get density 0.
    /// Pie pieces may wrap.
    pub fn from_pieces(geometry: Geometry, pieces: &[(Interval, Rational)]) -> Result<Self, MeasureError> {
        let mut segs: Vec<(Rational, Rational, Rational)> = Vec::new();
        for (iv, v) in pieces {
            if iv.geometry() != geometry {
                return Err(MeasureError::GeometryMismatch);
            }
            for (a, b) in iv.segments() {
                if a < b {
                    segs.push((a, b, v.clone()));
                }
            }
        }
        segs.sort_by(|x, y| x.0.cmp(&y.0));
        for w in segs.windows(2) {
            if w[1].0 < w[0].1 {
                let hi = if w[0].1 < w[1].1 { w[0].1.clone() } else { w[1].1.clone() };
                return Err(MeasureError::OverlappingPieces(w[1].0.clone(), hi));
            }
        }
        let mut breakpoints = vec![Rational::zero()];
        let mut values = Vec::new();
        for (a, b, v) in segs {
            if a > *breakpoints.last().unwrap() {
                values.push(Rational::zero());
                breakpoints.push(a);
            }
            values.push(v);
            breakpoints.push(b);
        }
        if !breakpoints.last().unwrap().is_one() {
            values.push(Rational::zero());
            breakpoints.push(Rational::one());
        }
        Self::new(geometry, breakpoints, values).map(|m| m.simplified())
    }

    pub fn uniform(geometry: Geometry) -> Self {
        Self::new(geometry, vec![Rational::zero(), Rational::one()], vec![Rational::one()])
            .expect("uniform density is normalized")
    }

    /// Density `c` on `[a,b]` (wrapping allowed on the pie) and zero elsewhere,
    /// with `c` chosen so the total mass is 1.
    pub fn indicator(interval: &Interval) -> Result<Self, MeasureError> {
        let len = interval.length();
        if len.is_zero() {
            return Err(MeasureError::NotNormalized { total: Rational::zero(), deficit: Rational::one() });
        }
        Self::from_pieces(interval.geometry(), &[(interval.clone(), len.recip())])
    }

    /// Merges adjacent cells with equal density.
    pub fn simplified(&self) -> Self {
        let mut bps = vec![self.breakpoints[0].clone()];
        let mut vals: Vec<Rational> = Vec::new();
        for (i, v) in self.values.iter().enumerate() {
            if vals.last() == Some(v) {
                *bps.last_mut().unwrap() = self.breakpoints[i + 1].clone();
            } else {
                vals.push(v.clone());
                bps.push(self.breakpoints[i + 1].clone());
            }
        }
        Self::new(self.geometry, bps, vals).expect("merging cells preserves validity")
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn max_density(&self) -> Rational {
        self.values.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    /// Same density, reinterpreted on another geometry (e.g. a pie cut open
    /// at 0 becomes a cake).
    pub fn with_geometry(&self, geometry: Geometry) -> Self {
        PiecewiseConstantMeasure { geometry, ..self.clone() }
    }

    fn cell_of(&self, x: &Rational) -> usize {
        let k = self.breakpoints.partition_point(|b| b <= x);
        k.saturating_sub(1).min(self.values.len() - 1)
    }

    pub fn density_at(&self, x: &Rational) -> Rational {
        self.values[self.cell_of(x)].clone()
    }

    /// `μ([0, x])` for `x ∈ [0,1]`.
    pub fn cdf(&self, x: &Rational) -> Rational {
        let c = self.cell_of(x);
        &self.cumulative[c] + &self.values[c] * (x - &self.breakpoints[c])
    }

    /// `μ([a, b])` for `0 ≤ a ≤ b ≤ 1`.
    pub fn between(&self, a: &Rational, b: &Rational) -> Rational {
        self.cdf(b) - self.cdf(a)
    }

    pub fn value(&self, interval: &Interval) -> Rational {
        interval.segments().iter().map(|(a, b)| self.between(a, b)).sum()
    }

    /// Value of a finite union of intervals that must be pairwise disjoint up
    /// to endpoints.
    pub fn measure_of(&self, set: &[Interval]) -> Result<Rational, MeasureError> {
        if let Some((a, b)) = first_overlap(set) {
            return Err(MeasureError::InvalidSet(a, b));
        }
        Ok(set.iter().map(|iv| self.value(iv)).sum())
    }

    /// Smallest `b ≥ a` with `μ([a,b]) = v`, or `None` when `[a,1]` is worth
    /// less than `v`. Plateaus of zero density resolve to their left end.
    pub fn leftmost_cut(&self, a: &Rational, v: &Rational) -> Option<Rational> {
        if !v.is_positive() {
            return Some(a.clone());
        }
        let target = self.cdf(a) + v;
        if target > *self.cumulative.last().unwrap() {
            return None;
        }
        let first = self.cell_of(a);
        let c = (first..self.values.len()).find(|&c| self.cumulative[c + 1] >= target)?;
        let left = if c == first { a.clone() } else { self.breakpoints[c].clone() };
        Some(&left + (&target - self.cdf(&left)) / &self.values[c])
    }

    /// Largest `b ≥ a` with `μ([a,b]) = v`, or `None` when `[a,1]` is worth
    /// less than `v`. Differs from [`Self::leftmost_cut`] only when the cut
    /// lands at the start of a zero-density plateau.
    pub fn rightmost_cut(&self, a: &Rational, v: &Rational) -> Option<Rational> {
        let mut x = self.leftmost_cut(a, v)?;
        let last = self.values.len() - 1;
        loop {
            let c = self.breakpoints.partition_point(|b| *b <= x).saturating_sub(1);
            if c > last || !self.values[c].is_zero() {
                return Some(x);
            }
            x = self.breakpoints[c + 1].clone();
        }
    }
}

/// First pair of intervals in `set` that overlaps with positive length.
pub(crate) fn first_overlap(set: &[Interval]) -> Option<(Rational, Rational)> {
    let mut segs: Vec<(Rational, Rational)> = set.iter().flat_map(Interval::segments).collect();
    segs.retain(|(a, b)| a < b);
    segs.sort();
    segs.windows(2).find(|w| w[1].0 < w[0].1).map(|w| {
        let hi = if w[0].1 < w[1].1 { w[0].1.clone() } else { w[1].1.clone() };
        (w[1].0.clone(), hi)
    })
}

/// Cells of a common refinement together with per-measure densities and
/// weights `W[i][c] = density_i(c) · length(c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Refinement {
    pub geometry: Geometry,
    pub cells: Vec<Interval>,
    pub densities: RationalMatrix,
    pub weights: RationalMatrix,
}

impl Refinement {
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut b: Vec<Rational> = self.cells.iter().map(|c| c.start().clone()).collect();
        b.push(Rational::one());
        b
    }
}

fn shared_geometry(ms: &[PiecewiseConstantMeasure]) -> Result<Geometry, MeasureError> {
    let g = ms.first().map_or(Geometry::Cake, PiecewiseConstantMeasure::geometry);
    if ms.iter().any(|m| m.geometry() != g) {
        return Err(MeasureError::GeometryMismatch);
    }
    Ok(g)
}

pub fn common_refinement(ms: &[PiecewiseConstantMeasure]) -> Result<Refinement, MeasureError> {
    let geometry = shared_geometry(ms)?;
    let mut bps: Vec<Rational> = ms.iter().flat_map(|m| m.breakpoints().iter().cloned()).collect();
    bps.push(Rational::zero());
    bps.push(Rational::one());
    bps.sort();
    bps.dedup();
    let cells: Vec<Interval> =
        bps.windows(2).map(|w| Interval { start: w[0].clone(), end: w[1].clone(), geometry }).collect();
    let densities: RationalMatrix =
        ms.iter().map(|m| cells.iter().map(|c| m.density_at(c.start())).collect()).collect();
    let weights = densities.iter().map(|row| row.iter().zip(&cells).map(|(d, c)| d * c.length()).collect()).collect();
    Ok(Refinement { geometry, cells, densities, weights })
}

/// Almost-everywhere equality of two densities.
pub fn measures_equal(a: &PiecewiseConstantMeasure, b: &PiecewiseConstantMeasure) -> Result<bool, MeasureError> {
    let r = common_refinement(&[a.clone(), b.clone()])?;
    Ok(r.densities[0] == r.densities[1])
}

/// `G[i][j] = ∫ f_i f_j`.
pub fn gram(ms: &[PiecewiseConstantMeasure]) -> Result<RationalMatrix, MeasureError> {
    let r = common_refinement(ms)?;
    let n = ms.len();
    let mut g = crate::linalg::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: Rational = r
                .cells
                .iter()
                .enumerate()
                .map(|(c, cell)| &r.densities[i][c] * &r.densities[j][c] * cell.length())
                .sum();
            g[j][i] = v.clone();
            g[i][j] = v;
        }
    }
    Ok(g)
}
