//! Constructive division protocols in the Robertson–Webb query model.
//!
//! Every protocol talks to the players only through [`RwOracle`]s, and every
//! query lands in a shared [`QueryLedger`].

use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;

use num_traits::{One, Signed, Zero};

use crate::divisions::{ConnectedDivision, Violation};
use crate::measures::{Geometry, PiecewiseConstantMeasure};
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryCounts {
    pub eval_count: u64,
    pub cut_count: u64,
}

#[derive(Debug, Default)]
pub struct QueryLedger {
    eval: Cell<u64>,
    cut: Cell<u64>,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn counts(&self) -> QueryCounts {
        QueryCounts { eval_count: self.eval.get(), cut_count: self.cut.get() }
    }
}

/// One player's side of the query model.
#[derive(Clone, Copy)]
pub struct RwOracle<'a> {
    measure: &'a PiecewiseConstantMeasure,
    ledger: &'a QueryLedger,
}

impl<'a> RwOracle<'a> {
    pub fn new(measure: &'a PiecewiseConstantMeasure, ledger: &'a QueryLedger) -> Self {
        RwOracle { measure, ledger }
    }

    pub fn measure(&self) -> &'a PiecewiseConstantMeasure {
        self.measure
    }

    /// `μ([a, b])`.
    pub fn eval(&self, a: &Rational, b: &Rational) -> Rational {
        self.ledger.eval.set(self.ledger.eval.get() + 1);
        self.measure.between(a, b)
    }

    /// Leftmost `b` with `μ([a, b]) = v`; `None` if `[a, 1]` is worth less.
    pub fn cut(&self, a: &Rational, v: &Rational) -> Option<Rational> {
        self.ledger.cut.set(self.ledger.cut.get() + 1);
        self.measure.leftmost_cut(a, v)
    }

    /// Rightmost `b` with `μ([a, b]) = v`; counted as a cut query.
    pub fn cut_right(&self, a: &Rational, v: &Rational) -> Option<Rational> {
        self.ledger.cut.set(self.ledger.cut.get() + 1);
        self.measure.rightmost_cut(a, v)
    }
}

pub fn oracles<'a>(ms: &'a [PiecewiseConstantMeasure], ledger: &'a QueryLedger) -> Vec<RwOracle<'a>> {
    ms.iter().map(|m| RwOracle::new(m, ledger)).collect()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AlgorithmError {
    #[error("protocol needs {expected} players, got {got}")]
    PlayerCount { expected: &'static str, got: usize },
    #[error("protocol runs on the cake; cut the pie open first")]
    NotCake,
    #[error("a player could not be offered the requested value")]
    CutUnavailable,
    #[error("order must be a permutation of the players")]
    BadOrder,
    #[error("bisection bracket [{lo}, {hi}] exhausted without an exact common value")]
    BracketExhausted { lo: Rational, hi: Rational },
    #[error("order search is limited to n ≤ {max}; got n = {n}")]
    SearchTooLarge { n: usize, max: usize },
    #[error("no player order yields an equitable division worth at least 1/n")]
    NoEquitableOrder,
    #[error("protocol produced an invalid division: {0}")]
    Division(#[from] Violation),
}

fn require_cake(oracles: &[RwOracle<'_>]) -> Result<(), AlgorithmError> {
    if oracles.iter().any(|o| o.measure.geometry() != Geometry::Cake) {
        return Err(AlgorithmError::NotCake);
    }
    Ok(())
}

/// Assembles a cake division from consecutive `(end, owner)` pieces.
fn from_pieces(pieces: Vec<(Rational, usize)>) -> Result<ConnectedDivision, AlgorithmError> {
    let n = pieces.len();
    let cuts = pieces[..n - 1].iter().map(|(x, _)| x.clone()).collect();
    let assignment = pieces.into_iter().map(|(_, p)| p).collect();
    Ok(ConnectedDivision::new(Geometry::Cake, cuts, assignment)?)
}

/// Player 0 halves the cake by its own measure; player 1 takes the piece it
/// prefers (the right one on ties).
pub fn cut_and_choose(oracles: &[RwOracle<'_>]) -> Result<ConnectedDivision, AlgorithmError> {
    if oracles.len() != 2 {
        return Err(AlgorithmError::PlayerCount { expected: "exactly 2", got: oracles.len() });
    }
    require_cake(oracles)?;
    let (zero, one) = (Rational::zero(), Rational::one());
    let x = oracles[0].cut(&zero, &rational::rat(1, 2)).ok_or(AlgorithmError::CutUnavailable)?;
    let left = oracles[1].eval(&zero, &x);
    let right = oracles[1].eval(&x, &one);
    let assignment = if left > right { vec![1, 0] } else { vec![0, 1] };
    Ok(ConnectedDivision::new(Geometry::Cake, vec![x], assignment)?)
}

/// Banach–Knaster last diminisher. Each round every remaining player marks
/// the point where the piece from the current left end is worth `1/n` to it;
/// the smallest mark (lowest index on ties) takes that piece.
pub fn last_diminisher(oracles: &[RwOracle<'_>]) -> Result<ConnectedDivision, AlgorithmError> {
    let n = oracles.len();
    if n == 0 {
        return Err(AlgorithmError::PlayerCount { expected: "at least 1", got: 0 });
    }
    require_cake(oracles)?;
    let share = rational::rat(1, n as i64);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut left = Rational::zero();
    let mut pieces = Vec::with_capacity(n);
    while remaining.len() > 1 {
        let mut best: Option<(Rational, usize)> = None;
        for &p in &remaining {
            let mark = oracles[p].cut(&left, &share).ok_or(AlgorithmError::CutUnavailable)?;
            if best.as_ref().is_none_or(|(b, _)| mark < *b) {
                best = Some((mark, p));
            }
        }
        let (mark, winner) = best.expect("non-empty");
        remaining.retain(|&p| p != winner);
        pieces.push((mark.clone(), winner));
        left = mark;
    }
    pieces.push((Rational::one(), remaining[0]));
    from_pieces(pieces)
}

/// Even–Paz divide and conquer. With `m` players on `[a, b]` and
/// `L = ⌈m/2⌉`, each player marks where `[a, ·]` reaches `L/m` of its value
/// for `[a, b]`; the `L` smallest marks go left of the `L`-th mark, the rest
/// go right, and both halves recurse.
pub fn even_paz(oracles: &[RwOracle<'_>]) -> Result<ConnectedDivision, AlgorithmError> {
    let n = oracles.len();
    if n == 0 {
        return Err(AlgorithmError::PlayerCount { expected: "at least 1", got: 0 });
    }
    require_cake(oracles)?;
    let mut pieces = Vec::with_capacity(n);
    let players: Vec<usize> = (0..n).collect();
    even_paz_rec(oracles, players, Rational::zero(), Rational::one(), &mut pieces)?;
    from_pieces(pieces)
}

fn even_paz_rec(
    oracles: &[RwOracle<'_>],
    players: Vec<usize>,
    a: Rational,
    b: Rational,
    out: &mut Vec<(Rational, usize)>,
) -> Result<(), AlgorithmError> {
    let m = players.len();
    if m == 1 {
        out.push((b, players[0]));
        return Ok(());
    }
    let left_size = m.div_ceil(2);
    let fraction = rational::rat(left_size as i64, m as i64);
    let mut marks = Vec::with_capacity(m);
    for &p in &players {
        let worth = oracles[p].eval(&a, &b);
        let mark = oracles[p].cut(&a, &(worth * &fraction)).ok_or(AlgorithmError::CutUnavailable)?;
        marks.push((mark, p));
    }
    marks.sort();
    let split = marks[left_size - 1].0.clone();
    let right: Vec<usize> = marks[left_size..].iter().map(|(_, p)| *p).collect();
    let left: Vec<usize> = marks.into_iter().take(left_size).map(|(_, p)| p).collect();
    even_paz_rec(oracles, left, a, split.clone(), out)?;
    even_paz_rec(oracles, right, split, b, out)
}

/// Number of cut queries [`even_paz`] issues for `n` players.
pub fn even_paz_cut_queries(n: usize) -> u64 {
    if n <= 1 {
        0
    } else {
        n as u64 + even_paz_cut_queries(n.div_ceil(2)) + even_paz_cut_queries(n / 2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OrderChoice {
    Fixed(Vec<usize>),
    /// Try every order (lexicographically) and keep the first whose common
    /// value is at least `1/n`.
    Search,
}

pub const EQUITABLE_SEARCH_MAX_N: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquitableOutcome {
    pub division: ConnectedDivision,
    pub value: Rational,
    pub order: Vec<usize>,
}

/// Connected division in which every player values its own piece at the same
/// `v*`. For a fixed left-to-right order the first `n − 1` players take
/// pieces worth `v` in turn; bisection on `v` finds the largest value at
/// which the last player's remainder can also be worth exactly `v`, and that
/// value is then solved exactly on the linear pieces at the bracket. Cuts
/// landing on a zero-density plateau may sit anywhere on it, which is what
/// makes the remainder reach `v` when leftmost cuts alone would jump past it.
pub fn equitable_connected(oracles: &[RwOracle<'_>], order: &OrderChoice) -> Result<EquitableOutcome, AlgorithmError> {
    let n = oracles.len();
    if n == 0 {
        return Err(AlgorithmError::PlayerCount { expected: "at least 1", got: 0 });
    }
    require_cake(oracles)?;
    match order {
        OrderChoice::Fixed(order) => {
            let mut seen = vec![false; n];
            if order.len() != n || order.iter().any(|&p| p >= n || core::mem::replace(&mut seen[p], true)) {
                return Err(AlgorithmError::BadOrder);
            }
            equitable_for_order(oracles, order)
        }
        OrderChoice::Search => {
            if n > EQUITABLE_SEARCH_MAX_N {
                return Err(AlgorithmError::SearchTooLarge { n, max: EQUITABLE_SEARCH_MAX_N });
            }
            let share = rational::rat(1, n as i64);
            let mut perm: Vec<usize> = (0..n).collect();
            loop {
                if let Ok(out) = equitable_for_order(oracles, &perm) {
                    if out.value >= share {
                        return Ok(out);
                    }
                }
                if !next_permutation(&mut perm) {
                    return Err(AlgorithmError::NoEquitableOrder);
                }
            }
        }
    }
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Reachable cut positions for a fixed common value `v`: entry `t` is the
/// interval `[lo, hi]` of points where the `(t+1)`-th cut can sit when every
/// earlier player in the order gets exactly `v`. The two ends differ when a
/// cut lands at the start of a zero-density plateau.
struct Reach {
    bounds: Vec<(Rational, Rational)>,
}

impl Reach {
    fn last(&self) -> (&Rational, &Rational) {
        let (lo, hi) = self.bounds.last().expect("n ≥ 2");
        (lo, hi)
    }
}

fn reach(oracles: &[RwOracle<'_>], order: &[usize], v: &Rational) -> Option<Reach> {
    let n = order.len();
    let mut bounds = Vec::with_capacity(n - 1);
    let (mut lo, mut hi) = (Rational::zero(), Rational::zero());
    for &p in &order[..n - 1] {
        let o = &oracles[p];
        let next_lo = o.cut(&lo, v)?;
        let next_hi = o.cut_right(&hi, v).unwrap_or_else(Rational::one);
        bounds.push((next_lo.clone(), next_hi.clone()));
        lo = next_lo;
        hi = next_hi;
    }
    Some(Reach { bounds })
}

/// The last player's remainder from the leftmost reachable final cut, minus
/// `v`; `None` if the earlier players cannot all get `v`. Nonincreasing in
/// `v`, and nonnegative exactly up to the largest equitable value.
fn slack_left(oracles: &[RwOracle<'_>], order: &[usize], v: &Rational) -> Option<(Rational, Rational)> {
    let r = reach(oracles, order, v)?;
    let (lo, _) = r.last();
    let last = &oracles[order[order.len() - 1]];
    Some((last.eval(lo, &Rational::one()) - v, lo.clone()))
}

/// Whether some cut vector gives every player exactly `v`: the last player's
/// remainder must pass through `v` as its start sweeps the reachable interval.
fn feasible(oracles: &[RwOracle<'_>], order: &[usize], v: &Rational) -> Option<Reach> {
    let r = reach(oracles, order, v)?;
    let last = &oracles[order[order.len() - 1]];
    let (lo, hi) = r.last();
    let one = Rational::one();
    (last.eval(hi, &one) <= *v && *v <= last.eval(lo, &one)).then_some(r)
}

/// Picks concrete cuts inside the reachable intervals, from the right.
fn build(oracles: &[RwOracle<'_>], order: &[usize], v: &Rational, r: &Reach) -> Vec<Rational> {
    let n = order.len();
    let mut cuts = vec![Rational::zero(); n - 1];
    let last = oracles[order[n - 1]].measure;
    // μ_last([x, 1]) = v  ⇔  cdf(x) = 1 − v
    let target = Rational::one() - v;
    let mut x = last.leftmost_cut(&Rational::zero(), &target).expect("feasible");
    for t in (0..n - 1).rev() {
        let (lo, _) = &r.bounds[t];
        if x < *lo {
            x = lo.clone();
        }
        cuts[t] = x.clone();
        if t > 0 {
            let m = oracles[order[t]].measure;
            let y = m.cdf(&x) - v;
            x = m.leftmost_cut(&Rational::zero(), &y).expect("reachable");
        }
    }
    cuts
}

/// Value-affine description `c0 + c1·v` of a cut position.
#[derive(Clone)]
struct Affine {
    c0: Rational,
    c1: Rational,
}

impl Affine {
    fn at(&self, v: &Rational) -> Rational {
        &self.c0 + &self.c1 * v
    }

    /// `v` at which the position equals `x`.
    fn solve(&self, x: &Rational) -> Option<Rational> {
        (!self.c1.is_zero()).then(|| (x - &self.c0) / &self.c1)
    }
}

fn cell_containing(m: &PiecewiseConstantMeasure, x: &Rational) -> usize {
    let bps = m.breakpoints();
    bps.partition_point(|b| b <= x).saturating_sub(1).min(bps.len() - 2)
}

/// Exact candidates for the largest equitable value near `v0`, assuming
/// every leftmost cut stays on the linear piece it occupies at `v0`: the
/// root of the last player's slack, and every `v` at which some cut reaches
/// the end of its piece (where it may jump across a zero-density plateau).
fn exact_candidates(oracles: &[RwOracle<'_>], order: &[usize], v0: &Rational) -> Vec<Rational> {
    let n = order.len();
    let mut out = Vec::new();
    let mut pos = Affine { c0: Rational::zero(), c1: Rational::zero() };
    for &p in &order[..n - 1] {
        let m = oracles[p].measure;
        let a0 = pos.at(v0);
        let Some(x0) = m.leftmost_cut(&a0, v0) else { return out };
        let ca = cell_containing(m, &a0);
        let (bp_a, d_a) = (&m.breakpoints()[ca], &m.values()[ca]);
        // cdf(a) = P_a + d_a (a − bp_a), affine in v
        let cdf_c0 = m.cdf(bp_a) + d_a * (&pos.c0 - bp_a);
        let cdf_c1 = d_a * &pos.c1;
        // the cut lies in the cell whose density carries it to the target
        let cb = {
            let c = cell_containing(m, &x0);
            if c > 0 && m.breakpoints()[c] == x0 {
                c - 1
            } else {
                c
            }
        };
        let d_b = &m.values()[cb];
        if d_b.is_zero() {
            return out;
        }
        let bp_b = &m.breakpoints()[cb];
        pos = Affine { c0: bp_b + (cdf_c0 - m.cdf(bp_b)) / d_b, c1: (cdf_c1 + Rational::one()) / d_b };
        out.extend(pos.solve(&m.breakpoints()[cb + 1]));
    }
    let last = oracles[order[n - 1]].measure;
    let c = cell_containing(last, &pos.at(v0));
    let (bp, d) = (&last.breakpoints()[c], &last.values()[c]);
    // remainder(v) = 1 − (cdf(bp) + d (pos − bp)) = v
    let g0 = last.cdf(bp) + d * (&pos.c0 - bp);
    let denom = Rational::one() + d * &pos.c1;
    if !denom.is_zero() {
        out.push((Rational::one() - g0) / denom);
    }
    out
}

const BISECTION_BITS: u32 = 40;

fn gives_everyone(oracles: &[RwOracle<'_>], order: &[usize], cuts: &[Rational], v: &Rational) -> bool {
    let mut a = Rational::zero();
    for (t, &p) in order.iter().enumerate() {
        let b = cuts.get(t).cloned().unwrap_or_else(Rational::one);
        if b < a || oracles[p].measure.between(&a, &b) != *v {
            return false;
        }
        a = b;
    }
    true
}

/// Largest `v` for which the order admits an equitable division. Bisection
/// brackets the point where the leftmost-cut slack turns negative; the exact
/// value is then recovered on the linear pieces at the bracket.
fn equitable_for_order(oracles: &[RwOracle<'_>], order: &[usize]) -> Result<EquitableOutcome, AlgorithmError> {
    let n = order.len();
    let finish = |v: Rational, cuts: Vec<Rational>| -> Result<EquitableOutcome, AlgorithmError> {
        let mut pieces: Vec<(Rational, usize)> = cuts.into_iter().zip(order.iter().copied()).collect();
        pieces.push((Rational::one(), order[n - 1]));
        Ok(EquitableOutcome { division: from_pieces(pieces)?, value: v, order: order.to_vec() })
    };
    if n == 1 {
        return finish(Rational::one(), Vec::new());
    }
    let holds = |v: &Rational| slack_left(oracles, order, v).filter(|(s, _)| !s.is_negative());
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    if holds(&hi).is_none() {
        let tolerance = rational::pow2_inv(BISECTION_BITS);
        let mut last_lo_cut = Rational::zero();
        while &hi - &lo > tolerance {
            let mid = rational::midpoint(&lo, &hi);
            match holds(&mid) {
                Some((_, final_cut)) => {
                    debug_assert!(final_cut >= last_lo_cut, "final cut must be nondecreasing in v");
                    last_lo_cut = final_cut;
                    lo = mid;
                }
                None => hi = mid,
            }
        }
    } else {
        lo = hi.clone();
    }
    let mut candidates = exact_candidates(oracles, order, &lo);
    candidates.push(lo.clone());
    candidates.retain(|v| v.is_positive() && *v <= Rational::one() && *v >= lo && *v <= hi);
    candidates.sort();
    candidates.dedup();
    for v in candidates.into_iter().rev() {
        if let Some(r) = feasible(oracles, order, &v) {
            let cuts = build(oracles, order, &v, &r);
            if gives_everyone(oracles, order, &cuts, &v) {
                return finish(v, cuts);
            }
        }
    }
    Err(AlgorithmError::BracketExhausted { lo, hi })
}

/// Reads a cake division of a pie cut open at 0 back as a pie division.
pub fn reopen_as_pie(d: &ConnectedDivision) -> Result<ConnectedDivision, Violation> {
    let mut cuts = vec![Rational::zero()];
    cuts.extend(d.cuts().iter().map(crate::measures::frac));
    ConnectedDivision::new(Geometry::Pie, cuts, d.assignment().to_vec())
}
