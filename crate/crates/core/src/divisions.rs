//! Partitions of the cake or pie and their sharing matrices.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::linalg::RationalMatrix;
use crate::measures::{frac, Geometry, Interval, PiecewiseConstantMeasure};
use crate::rational::Rational;

/// Why a proposed partition is not a partition.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Violation {
    #[error("a division needs at least one player")]
    NoPlayers,
    #[error("expected {expected} cuts, got {got}")]
    CutCount { expected: usize, got: usize },
    #[error("cut {0} lies outside [0,1)")]
    CutOutOfRange(Rational),
    #[error("cuts are not in (cyclic) order")]
    CutsOutOfOrder,
    #[error("assignment is not a permutation of 0..{0}")]
    NotPermutation(usize),
    #[error("interval geometry does not match the division")]
    GeometryMismatch,
    #[error("shares of players {first} and {second} overlap on [{start}, {end}]")]
    Overlap { first: usize, second: usize, start: Rational, end: Rational },
    #[error("shares leave length {length} uncovered")]
    Uncovered { length: Rational },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DivisionError {
    #[error("invalid division: {0}")]
    Invalid(#[from] Violation),
    #[error("division has {players} players but {measures} measures were supplied")]
    PlayerCount { players: usize, measures: usize },
    #[error("measure geometry differs from division geometry")]
    GeometryMismatch,
    #[error("operation requires a pie division")]
    NotPie,
    #[error("invalid sharing matrix: {0}")]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixError {
    #[error("matrix is not square and non-empty")]
    NotSquare,
    #[error("entry ({row}, {col}) = {value} is outside [0,1]")]
    EntryOutOfRange { row: usize, col: usize, value: Rational },
    #[error("row {row} sums to {sum}, not 1")]
    RowSum { row: usize, sum: Rational },
}

/// Connected division: one interval (cake) or arc (pie) per player.
///
/// On the cake `cuts` holds the `n − 1` interior cut points
/// `x₁ ≤ … ≤ x_{n−1}`; piece `j` is `[x_j, x_{j+1}]` with `x₀ = 0`, `x_n = 1`.
/// On the pie `cuts` holds `n` points in cyclic order and piece `j` is the
/// arc from `cuts[j]` to `cuts[j+1]` (the last one wraps back to `cuts[0]`).
/// Piece `j` goes to player `assignment[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectedDivision {
    geometry: Geometry,
    cuts: Vec<Rational>,
    assignment: Vec<usize>,
}

impl ConnectedDivision {
    pub fn new(geometry: Geometry, cuts: Vec<Rational>, assignment: Vec<usize>) -> Result<Self, Violation> {
        let d = ConnectedDivision { geometry, cuts, assignment };
        d.validate()?;
        Ok(d)
    }

    /// Cake division handing out pieces left to right in player order.
    pub fn cake_in_order(cuts: Vec<Rational>) -> Result<Self, Violation> {
        let n = cuts.len() + 1;
        Self::new(Geometry::Cake, cuts, (0..n).collect())
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn cuts(&self) -> &[Rational] {
        &self.cuts
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn player_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn validate(&self) -> Result<(), Violation> {
        let n = self.assignment.len();
        if n == 0 {
            return Err(Violation::NoPlayers);
        }
        let mut seen = vec![false; n];
        for &p in &self.assignment {
            if p >= n || core::mem::replace(&mut seen[p], true) {
                return Err(Violation::NotPermutation(n));
            }
        }
        let expected = match self.geometry {
            Geometry::Cake => n - 1,
            Geometry::Pie => n,
        };
        if self.cuts.len() != expected {
            return Err(Violation::CutCount { expected, got: self.cuts.len() });
        }
        match self.geometry {
            Geometry::Cake => {
                if let Some(c) = self.cuts.iter().find(|c| c.is_negative() || **c > Rational::one()) {
                    return Err(Violation::CutOutOfRange(c.clone()));
                }
                if self.cuts.windows(2).any(|w| w[0] > w[1]) {
                    return Err(Violation::CutsOutOfOrder);
                }
            }
            Geometry::Pie => {
                if let Some(c) = self.cuts.iter().find(|c| c.is_negative() || **c >= Rational::one()) {
                    return Err(Violation::CutOutOfRange(c.clone()));
                }
                let total: Rational = self.arc_lengths().iter().sum();
                if !(total.is_one() || total.is_zero()) {
                    return Err(Violation::CutsOutOfOrder);
                }
            }
        }
        Ok(())
    }

    fn arc_lengths(&self) -> Vec<Rational> {
        let n = self.cuts.len();
        (0..n).map(|j| frac(&(&self.cuts[(j + 1) % n] - &self.cuts[j]))).collect()
    }

    /// Pieces in cut order (before assignment).
    pub fn pieces(&self) -> Vec<Interval> {
        match self.geometry {
            Geometry::Cake => {
                let mut pts = Vec::with_capacity(self.cuts.len() + 2);
                pts.push(Rational::zero());
                pts.extend(self.cuts.iter().cloned());
                pts.push(Rational::one());
                pts.windows(2).map(|w| Interval::cake(w[0].clone(), w[1].clone()).expect("validated cuts")).collect()
            }
            Geometry::Pie => {
                let mut lengths = self.arc_lengths();
                if lengths.iter().all(Zero::is_zero) {
                    *lengths.last_mut().unwrap() = Rational::one();
                }
                self.cuts.iter().zip(&lengths).map(|(s, l)| Interval::arc(s, l).expect("validated cuts")).collect()
            }
        }
    }

    /// `shares()[i]` is the (single) interval held by player `i`.
    pub fn shares(&self) -> Vec<Vec<Interval>> {
        let mut out = vec![Vec::new(); self.player_count()];
        for (piece, &player) in self.pieces().into_iter().zip(&self.assignment) {
            out[player].push(piece);
        }
        out
    }

    pub fn to_general(&self) -> GeneralDivision {
        GeneralDivision { geometry: self.geometry, shares: self.shares() }
    }
}

/// Arbitrary division: each player holds a finite union of intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralDivision {
    geometry: Geometry,
    shares: Vec<Vec<Interval>>,
}

impl GeneralDivision {
    pub fn new(geometry: Geometry, shares: Vec<Vec<Interval>>) -> Result<Self, Violation> {
        validate_shares(geometry, &shares)?;
        Ok(GeneralDivision { geometry, shares })
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    pub fn shares(&self) -> &[Vec<Interval>] {
        &self.shares
    }

    pub fn player_count(&self) -> usize {
        self.shares.len()
    }

    /// The connected division with the same shares, when every player holds
    /// exactly one interval.
    pub fn to_connected(&self) -> Option<ConnectedDivision> {
        if self.shares.iter().any(|s| s.len() != 1) {
            return None;
        }
        let mut order: Vec<usize> = (0..self.shares.len()).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (&self.shares[a][0], &self.shares[b][0]);
            (x.start(), x.end()).cmp(&(y.start(), y.end()))
        });
        let starts = order.iter().map(|&p| self.shares[p][0].start().clone());
        let cuts: Vec<Rational> = match self.geometry {
            Geometry::Cake => starts.skip(1).collect(),
            Geometry::Pie => starts.collect(),
        };
        let d = ConnectedDivision::new(self.geometry, cuts, order).ok()?;
        (d.shares() == self.shares).then_some(d)
    }
}

fn validate_shares(geometry: Geometry, shares: &[Vec<Interval>]) -> Result<(), Violation> {
    if shares.is_empty() {
        return Err(Violation::NoPlayers);
    }
    let mut segs: Vec<(Rational, Rational, usize)> = Vec::new();
    for (p, share) in shares.iter().enumerate() {
        for iv in share {
            if iv.geometry() != geometry {
                return Err(Violation::GeometryMismatch);
            }
            for (a, b) in iv.segments() {
                if a < b {
                    segs.push((a, b, p));
                }
            }
        }
    }
    segs.sort();
    let mut covered = Rational::zero();
    for (i, (a, b, p)) in segs.iter().enumerate() {
        if let Some((_, d, q)) = segs[..i].iter().find(|s| s.1 > *a) {
            let end = if d < b { d.clone() } else { b.clone() };
            return Err(Violation::Overlap { first: (*q).min(*p), second: (*q).max(*p), start: a.clone(), end });
        }
        covered += b - a;
    }
    if covered < Rational::one() {
        return Err(Violation::Uncovered { length: Rational::one() - covered });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Division {
    Connected(ConnectedDivision),
    General(GeneralDivision),
}

impl Division {
    pub fn geometry(&self) -> Geometry {
        match self {
            Division::Connected(d) => d.geometry(),
            Division::General(d) => d.geometry(),
        }
    }

    pub fn player_count(&self) -> usize {
        match self {
            Division::Connected(d) => d.player_count(),
            Division::General(d) => d.player_count(),
        }
    }

    pub fn validate(&self) -> Result<(), Violation> {
        match self {
            Division::Connected(d) => d.validate(),
            Division::General(d) => validate_shares(d.geometry, &d.shares),
        }
    }

    pub fn shares(&self) -> Vec<Vec<Interval>> {
        match self {
            Division::Connected(d) => d.shares(),
            Division::General(d) => d.shares.clone(),
        }
    }
}

impl From<ConnectedDivision> for Division {
    fn from(d: ConnectedDivision) -> Self {
        Division::Connected(d)
    }
}

impl From<GeneralDivision> for Division {
    fn from(d: GeneralDivision) -> Self {
        Division::General(d)
    }
}

/// `M[i][j] = μ_i(X_j)`; square, entries in `[0,1]`, rows summing to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SharingMatrix {
    entries: RationalMatrix,
}

impl SharingMatrix {
    pub fn new(entries: RationalMatrix) -> Result<Self, MatrixError> {
        let n = entries.len();
        if n == 0 || entries.iter().any(|r| r.len() != n) {
            return Err(MatrixError::NotSquare);
        }
        for (i, row) in entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if v.is_negative() || *v > Rational::one() {
                    return Err(MatrixError::EntryOutOfRange { row: i, col: j, value: v.clone() });
                }
            }
            let sum: Rational = row.iter().sum();
            if !sum.is_one() {
                return Err(MatrixError::RowSum { row: i, sum });
            }
        }
        Ok(SharingMatrix { entries })
    }

    /// The matrix of an exact division: every entry `1/n`.
    pub fn exact(n: usize) -> Self {
        let v = Rational::new(1.into(), (n as i64).into());
        SharingMatrix { entries: vec![vec![v; n]; n] }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i]
    }

    pub fn entries(&self) -> &RationalMatrix {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<Rational> {
        (0..self.n()).map(|i| self.entries[i][i].clone()).collect()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|r| r.iter().map(crate::rational::to_f64).collect()).collect()
    }
}

/// Exact sharing matrix of a division: column `j` is the share of player `j`.
pub fn sharing_matrix(d: &Division, ms: &[PiecewiseConstantMeasure]) -> Result<SharingMatrix, DivisionError> {
    d.validate()?;
    if d.player_count() != ms.len() {
        return Err(DivisionError::PlayerCount { players: d.player_count(), measures: ms.len() });
    }
    if ms.iter().any(|m| m.geometry() != d.geometry()) {
        return Err(DivisionError::GeometryMismatch);
    }
    let shares = d.shares();
    let entries = ms.iter().map(|m| shares.iter().map(|s| s.iter().map(|iv| m.value(iv)).sum()).collect()).collect();
    Ok(SharingMatrix::new(entries)?)
}

/// Rotates every pie cut by `t` (mod 1); pieces keep their owners.
pub fn pie_rotate(d: &ConnectedDivision, t: &Rational) -> Result<ConnectedDivision, DivisionError> {
    if d.geometry() != Geometry::Pie {
        return Err(DivisionError::NotPie);
    }
    let cuts = d.cuts.iter().map(|c| frac(&(c + t))).collect();
    Ok(ConnectedDivision::new(Geometry::Pie, cuts, d.assignment.clone())?)
}
