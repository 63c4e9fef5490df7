//! The two counterexample families and the grid searches that certify, at a
//! fixed player count and resolution, that no connected division achieves the
//! forbidden combination of properties.
//!
//! The certificates are numerical evidence, not proofs: they cover every
//! connected division with cuts on the search grid, plus local refinement and
//! an exact linear-programming polish around the best candidates.

use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::divisions::{sharing_matrix, ConnectedDivision, Division, DivisionError, SharingMatrix, Violation};
use crate::fairness::{self, FairnessError};
use crate::fixtures;
use crate::measures::{Geometry, PiecewiseConstantMeasure};
use crate::rational::{self, int, rat, Rational};
use crate::simplex;

/// Largest player count the grid searches accept.
pub const MAX_SEARCH_N: usize = 8;

/// Shares below this violation score count as near-feasible for the
/// structural check of the pie argument.
pub const NEAR_FEASIBLE: f64 = 0.05;

/// Certification bar: the pie search passes when `V* > POSITIVITY_BAR` (or,
/// for the `k = n` sanity inversion, when `V* ≤ POSITIVITY_BAR`).
pub const POSITIVITY_BAR: f64 = 1e-6;

const CANDIDATES: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ImpossibilityError {
    #[error("the pie theorem requires n ≥ 5, got {0}")]
    PieTooFewPlayers(usize),
    #[error("the cake theorem requires n ≥ {min}, got {got}")]
    CakeTooFewPlayers { min: usize, got: usize },
    #[error("grid searches support at most {max} players, got {got}")]
    TooManyPlayers { max: usize, got: usize },
    #[error("grid {grid} does not place every breakpoint on a grid point")]
    GridMisaligned { grid: u32 },
    #[error("grid {grid} is too coarse: each special arc needs at least 3 grid points")]
    GridTooCoarse { grid: u32 },
    #[error("refinement depth {0} is too deep")]
    RefineTooDeep(u32),
    #[error(transparent)]
    Fairness(#[from] FairnessError),
    #[error(transparent)]
    Invalid(#[from] Violation),
    #[error(transparent)]
    Division(#[from] DivisionError),
}

/// Pie measures of the equitability theorem, for `n ≥ 5`.
pub fn pie_counterexample(n: usize) -> Result<Vec<PiecewiseConstantMeasure>, ImpossibilityError> {
    if n < 5 {
        return Err(ImpossibilityError::PieTooFewPlayers(n));
    }
    Ok(fixtures::pie_measures(n))
}

/// Cake measures of the Pareto theorem, for `n ≥ 2`.
pub fn cake_counterexample(n: usize) -> Result<Vec<PiecewiseConstantMeasure>, ImpossibilityError> {
    if n < 2 {
        return Err(ImpossibilityError::CakeTooFewPlayers { min: 2, got: n });
    }
    Ok(fixtures::cake_measures(n))
}

/// Division of the cake instance that Pareto-dominates every
/// `(n−1)`-proportional one: player 0 gets `[0, 1/2n]` and the rest is split
/// into `n − 1` equal intervals in player order.
pub fn dominating_division(n: usize) -> Result<ConnectedDivision, ImpossibilityError> {
    if n < 2 {
        return Err(ImpossibilityError::CakeTooFewPlayers { min: 2, got: n });
    }
    let first = rat(1, 2 * n as i64);
    let rest = Rational::one() - &first;
    let cuts = (1..n).map(|i| &first + &rest * rat(i as i64 - 1, n as i64 - 1)).collect();
    Ok(ConnectedDivision::cake_in_order(cuts).expect("increasing cuts"))
}

/// `V = max(0, −slack_k) + (max_i M_ii − min_i M_ii)`, zero exactly when the
/// matrix is `k`-proportional and equitable.
pub fn violation_score_exact(m: &SharingMatrix, k: usize) -> Result<Rational, FairnessError> {
    let slack = fairness::worst_k_witness(m, k)?.slack;
    let diag = m.diagonal();
    let spread = diag.iter().max().unwrap() - diag.iter().min().unwrap();
    Ok(if slack.is_negative() { spread - slack } else { spread })
}

/// Floating-point version of [`violation_score_exact`] on a raw matrix.
pub fn violation_score(m: &[Vec<f64>], k: usize) -> f64 {
    let n = m.len();
    let mut slack = f64::INFINITY;
    let mut others = Vec::with_capacity(n);
    for (i, row) in m.iter().enumerate() {
        others.clear();
        others.extend(row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v));
        others.sort_by(|a, b| b.total_cmp(a));
        let top: f64 = others.iter().take(k - 1).sum();
        slack = slack.min(row[i] - (row[i] + top) / k as f64);
    }
    let (lo, hi) = (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| (lo.min(m[i][i]), hi.max(m[i][i])));
    (-slack).max(0.0) + (hi - lo)
}

/// Pie violation score of a cut vector and assignment (piece → player).
pub fn violation_score_pie(
    cuts: &[Rational],
    assignment: &[usize],
    ms: &[PiecewiseConstantMeasure],
    k: usize,
) -> Result<Rational, ImpossibilityError> {
    let d = ConnectedDivision::new(Geometry::Pie, cuts.to_vec(), assignment.to_vec())?;
    let m = sharing_matrix(&Division::Connected(d), ms)?;
    Ok(violation_score_exact(&m, k)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem {
    /// No pie division is `(n−1)`-proportional and equitable.
    PieEquitable,
    /// No cake division is `(n−1)`-proportional and Pareto optimal.
    CakePareto,
}

impl Theorem {
    pub fn id(self) -> &'static str {
        match self {
            Theorem::PieEquitable => "pie-kprop-equitable",
            Theorem::CakePareto => "cake-kprop-pareto",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PieEvidence {
    /// Minimal score over the grid, before refinement.
    pub grid_v: f64,
    /// Minimal score after coordinate descent.
    pub refined_v: f64,
    /// Minimal score anywhere, including the exact polish; this is `V*`.
    pub v_star: f64,
    /// `V*` recomputed exactly at the best division.
    pub v_star_exact: Rational,
    pub best: ConnectedDivision,
    /// Near-feasible grid divisions (score below [`NEAR_FEASIBLE`]).
    pub near_feasible: u64,
    /// Near-feasible grid divisions where some uniform player's arc misses
    /// `[0,1/6]` or `[1/2,2/3]`.
    pub mechanism_confirmed: u64,
    pub polish_programs: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CakeEvidence {
    /// `(n−1)`-proportional (division, assignment) pairs on the grid.
    pub proportional_found: u64,
    /// Of those, how many have a diagonal farther than `h · max density`
    /// from `1/n`.
    pub diagonal_failures: u64,
    /// Of those, how many the dominating division fails to dominate.
    pub undominated: u64,
    pub first_found: Option<ConnectedDivision>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Evidence {
    Pie(PieEvidence),
    Cake(CakeEvidence),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchCertificate {
    pub theorem: Theorem,
    pub n: usize,
    pub k: usize,
    /// Grid step is `1/grid`.
    pub grid: u32,
    pub refine_rounds: u32,
    pub divisions_examined: u64,
    pub assignments_examined: u64,
    pub evidence: Evidence,
    pub passed: bool,
    pub wall_time_secs: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PieSearch {
    pub n: usize,
    pub k: usize,
    pub grid: u32,
    pub refine_rounds: u32,
    pub threads: usize,
}

impl PieSearch {
    /// `k = n − 1`, grid `1/60`, three refinement rounds.
    pub fn new(n: usize) -> Self {
        PieSearch { n, k: n.saturating_sub(1), grid: 60, refine_rounds: 3, threads: 1 }
    }
}

struct Clock {
    #[cfg(feature = "std")]
    start: std::time::Instant,
}

impl Clock {
    fn start() -> Self {
        Clock {
            #[cfg(feature = "std")]
            start: std::time::Instant::now(),
        }
    }

    fn elapsed(&self) -> Option<f64> {
        #[cfg(feature = "std")]
        {
            Some(self.start.elapsed().as_secs_f64())
        }
        #[cfg(not(feature = "std"))]
        {
            None
        }
    }
}

fn to_i64(r: &Rational) -> i64 {
    assert!(r.is_integer(), "grid value {r} is not integral");
    r.to_integer().to_i64().expect("grid value fits in i64")
}

/// Least common denominator of all densities.
fn density_lcd(ms: &[PiecewiseConstantMeasure]) -> i64 {
    let l = ms.iter().flat_map(|m| m.values()).fold(num_bigint::BigInt::one(), |acc, v| acc.lcm(v.denom()));
    l.to_i64().expect("small denominators")
}

/// Integer cumulative tables: with grid `g` and density denominator `l`,
/// `μ([0, u/g]) · l·g` is an integer for every grid point `u`. Tables run
/// to `2g` so wrapping arcs can be read off as differences.
struct Tables {
    g: i64,
    scale: i64,
    cdf: Vec<Vec<i64>>,
}

impl Tables {
    fn new(types: &[&PiecewiseConstantMeasure], g: i64, l: i64) -> Self {
        let scale = g * l;
        let cdf = types
            .iter()
            .map(|m| {
                let base: Vec<i64> = (0..=g).map(|u| to_i64(&(m.cdf(&rat(u, g)) * int(scale)))).collect();
                let mut t = base.clone();
                t.extend(base[1..].iter().map(|v| v + scale));
                t
            })
            .collect();
        Tables { g, scale, cdf }
    }

    /// Values of the pieces `[c_j, c_{j+1}]` (last one wrapping) under type `t`.
    fn pieces(&self, t: usize, cuts: &[i64], out: &mut [i64]) {
        let f = &self.cdf[t];
        let n = cuts.len();
        for j in 0..n - 1 {
            out[j] = f[cuts[j + 1] as usize] - f[cuts[j] as usize];
        }
        out[n - 1] = f[(cuts[0] + self.g) as usize] - f[cuts[n - 1] as usize];
    }
}

/// `(k−1)·v_p − (sum of the k−1 largest other values)`, which is `k·S` times
/// the `k`-proportionality slack of whoever holds piece `p`.
fn scaled_slacks(vals: &[i64], total: i64, k: usize, out: &mut [i64]) {
    let n = vals.len();
    let drop = n - k;
    for p in 0..n {
        let bottom = match drop {
            0 => 0,
            1 => (0..n).filter(|&j| j != p).map(|j| vals[j]).min().unwrap(),
            _ => {
                let mut others = [0i64; MAX_SEARCH_N];
                let mut m = 0;
                for j in (0..n).filter(|&j| j != p) {
                    others[m] = vals[j];
                    m += 1;
                }
                others[..m].sort_unstable();
                others[..drop].iter().sum()
            }
        };
        let top = total - vals[p] - bottom;
        out[p] = (k as i64 - 1) * vals[p] - top;
    }
}

/// Player 0 holds piece `a`, player 1 piece `b`, uniform players the rest.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Candidate {
    v: i64,
    cuts: Vec<i64>,
    a: usize,
    b: usize,
}

impl Candidate {
    fn assignment(&self, n: usize) -> Vec<usize> {
        let mut next = 2;
        (0..n)
            .map(|p| {
                if p == self.a {
                    0
                } else if p == self.b {
                    1
                } else {
                    next += 1;
                    next - 1
                }
            })
            .collect()
    }
}

fn push_candidate(best: &mut Vec<Candidate>, c: Candidate) {
    if best.len() == CANDIDATES && c >= *best.last().unwrap() {
        return;
    }
    let at = best.partition_point(|b| *b < c);
    best.insert(at, c);
    best.truncate(CANDIDATES);
}

struct PieKernel {
    n: usize,
    k: usize,
    tables: Tables,
    special: [(i64, i64); 2],
}

#[derive(Default)]
struct Scratch {
    vals: [[i64; MAX_SEARCH_N]; 3],
    slacks: [[i64; MAX_SEARCH_N]; 3],
}

impl PieKernel {
    fn new(ms: &[PiecewiseConstantMeasure], n: usize, k: usize, g: i64) -> Self {
        let l = density_lcd(ms);
        let tables = Tables::new(&[&ms[0], &ms[1], &ms[2]], g, l);
        PieKernel { n, k, tables, special: [(0, g / 6), (g / 2, 2 * g / 3)] }
    }

    fn load(&self, cuts: &[i64], s: &mut Scratch) {
        let n = self.n;
        for t in 0..3 {
            self.tables.pieces(t, cuts, &mut s.vals[t][..n]);
            scaled_slacks(&s.vals[t][..n], self.tables.scale, self.k, &mut s.slacks[t][..n]);
        }
    }

    /// Scaled score: `V · k · S`.
    fn score(&self, s: &Scratch, a: usize, b: usize) -> i64 {
        let mut slack = s.slacks[0][a].min(s.slacks[1][b]);
        let (mut lo, mut hi) = (s.vals[0][a].min(s.vals[1][b]), s.vals[0][a].max(s.vals[1][b]));
        for p in (0..self.n).filter(|&p| p != a && p != b) {
            slack = slack.min(s.slacks[2][p]);
            lo = lo.min(s.vals[2][p]);
            hi = hi.max(s.vals[2][p]);
        }
        (-slack).max(0) + self.k as i64 * (hi - lo)
    }

    fn denominator(&self) -> i64 {
        self.k as i64 * self.tables.scale
    }

    fn meets(&self, s: i64, e: i64, (lo, hi): (i64, i64)) -> bool {
        let g = self.tables.g;
        (s < hi && lo < e) || (s < hi + g && lo + g < e)
    }

    /// Whether some uniform player's arc misses one of the two special arcs.
    fn mechanism(&self, cuts: &[i64], a: usize, b: usize) -> bool {
        let n = self.n;
        (0..n).filter(|&p| p != a && p != b).any(|p| {
            let s = cuts[p];
            let e = if p + 1 < n { cuts[p + 1] } else { cuts[0] + self.tables.g };
            !(self.meets(s, e, self.special[0]) && self.meets(s, e, self.special[1]))
        })
    }
}

#[derive(Default)]
struct BlockResult {
    best: Vec<Candidate>,
    divisions: u64,
    near_feasible: u64,
    mechanism_confirmed: u64,
}

impl BlockResult {
    fn merge(&mut self, other: BlockResult) {
        for c in other.best {
            push_candidate(&mut self.best, c);
        }
        self.divisions += other.divisions;
        self.near_feasible += other.near_feasible;
        self.mechanism_confirmed += other.mechanism_confirmed;
    }
}

/// Every nondecreasing cut vector with first cut `c0`.
fn search_block(kernel: &PieKernel, c0: i64) -> BlockResult {
    let n = kernel.n;
    let g = kernel.tables.g;
    let near = (NEAR_FEASIBLE * kernel.denominator() as f64) as i64;
    let mut out = BlockResult::default();
    let mut cuts = vec![c0; n];
    let mut s = Scratch::default();
    loop {
        kernel.load(&cuts, &mut s);
        out.divisions += 1;
        for a in 0..n {
            for b in (0..n).filter(|&b| b != a) {
                let v = kernel.score(&s, a, b);
                if v < near {
                    out.near_feasible += 1;
                    if kernel.mechanism(&cuts, a, b) {
                        out.mechanism_confirmed += 1;
                    }
                }
                if out.best.len() < CANDIDATES || v <= out.best.last().unwrap().v {
                    push_candidate(&mut out.best, Candidate { v, cuts: cuts.clone(), a, b });
                }
            }
        }
        // next nondecreasing vector, cuts[0] fixed
        let mut j = n - 1;
        while j > 0 && cuts[j] == g - 1 {
            j -= 1;
        }
        if j == 0 {
            return out;
        }
        cuts[j] += 1;
        for i in j + 1..n {
            cuts[i] = cuts[j];
        }
    }
}

fn run_blocks(kernel: &PieKernel, threads: usize) -> BlockResult {
    let g = kernel.tables.g;
    let blocks: Vec<BlockResult> = {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            let work = || (0..g).into_par_iter().map(|c0| search_block(kernel, c0)).collect();
            match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
                Ok(pool) if threads > 1 => pool.install(work),
                _ => (0..g).map(|c0| search_block(kernel, c0)).collect(),
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            let _ = threads;
            (0..g).map(|c0| search_block(kernel, c0)).collect()
        }
    };
    let mut total = BlockResult::default();
    for b in blocks {
        total.merge(b);
    }
    total
}

/// Coordinate descent on one candidate at the kernel's resolution, with the
/// given step sizes in grid units; the assignment stays fixed.
fn descend(kernel: &PieKernel, mut c: Candidate, steps: &[i64]) -> Candidate {
    let n = kernel.n;
    let g = kernel.tables.g;
    let mut s = Scratch::default();
    for &step in steps {
        loop {
            let mut improved = false;
            for j in 0..n {
                for delta in [-step, step] {
                    let x = c.cuts[j] + delta;
                    let lo = if j == 0 { 0 } else { c.cuts[j - 1] };
                    let hi = if j + 1 == n { g - 1 } else { c.cuts[j + 1] };
                    if x < lo || x > hi {
                        continue;
                    }
                    let mut cuts = c.cuts.clone();
                    cuts[j] = x;
                    kernel.load(&cuts, &mut s);
                    let v = kernel.score(&s, c.a, c.b);
                    if v < c.v {
                        c = Candidate { v, cuts, a: c.a, b: c.b };
                        improved = true;
                    }
                }
            }
            if !improved {
                break;
            }
        }
    }
    c
}

/// Affine function of the cut offsets `y`: `constant + Σ coef_j y_j`.
#[derive(Clone, Debug)]
struct Affine {
    coef: Vec<Rational>,
    constant: Rational,
}

impl Affine {
    fn constant(n: usize, c: Rational) -> Self {
        Affine { coef: vec![Rational::zero(); n], constant: c }
    }

    fn add_scaled(&mut self, other: &Affine, s: &Rational) {
        for (a, b) in self.coef.iter_mut().zip(&other.coef) {
            *a += b * s;
        }
        self.constant += &other.constant * s;
    }
}

/// Breakpoint cells of all measures on `[0,1]`.
fn cells(ms: &[PiecewiseConstantMeasure]) -> Vec<Rational> {
    let mut pts: Vec<Rational> = ms.iter().flat_map(|m| m.breakpoints().iter().cloned()).collect();
    pts.sort();
    pts.dedup();
    pts
}

/// Candidate cells `[pts[i], pts[i+1]]` for a cut at `x`: one if `x` is
/// interior, both neighbours if it sits on a breakpoint.
fn cell_options(pts: &[Rational], x: &Rational) -> Vec<usize> {
    let i = pts.partition_point(|p| p <= x) - 1;
    let last = pts.len() - 2;
    if pts[i] == *x && i > 0 {
        vec![i - 1, i.min(last)]
    } else {
        vec![i.min(last)]
    }
}

fn combinations(pool: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &first) in pool.iter().enumerate() {
        for mut rest in combinations(&pool[i + 1..], size - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Minimizes `V` exactly over all cut vectors whose cuts stay inside the
/// chosen breakpoint cells, with the assignment fixed. Inside such a region
/// every sharing-matrix entry is affine in the cuts, so `V` is the optimum of
/// a linear program in epigraph form.
fn polish_region(
    ms: &[PiecewiseConstantMeasure],
    pts: &[Rational],
    region: &[usize],
    assignment: &[usize],
    k: usize,
) -> Option<Vec<Rational>> {
    let n = ms.len();
    // variables: y_0..y_{n-1}, t, u, l; then one slack per inequality
    let core = n + 3;
    let (t, u, l) = (n, n + 1, n + 2);
    let lo: Vec<&Rational> = region.iter().map(|&c| &pts[c]).collect();
    let cdf = |m: &PiecewiseConstantMeasure, j: usize| {
        let c = region[j];
        let mut f = Affine::constant(n, m.cdf(&pts[c]));
        f.coef[j] = m.values()[m.breakpoints().partition_point(|b| *b <= pts[c]) - 1].clone();
        f
    };
    let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
    let mut le = |coef: Vec<Rational>, rhs: Rational| rows.push((coef, rhs));
    let pad = |a: &Affine| {
        let mut v = a.coef.clone();
        v.resize(core, Rational::zero());
        v
    };
    for j in 0..n {
        let mut c = vec![Rational::zero(); core];
        c[j] = Rational::one();
        le(c, &pts[region[j] + 1] - lo[j]);
        if j + 1 < n {
            // x_j ≤ x_{j+1}
            let mut c = vec![Rational::zero(); core];
            c[j] = Rational::one();
            c[j + 1] = -Rational::one();
            le(c, lo[j + 1] - lo[j]);
        }
    }
    // values[i][j] = μ_i(piece held by player j)
    let mut holder = vec![0; n];
    for (p, &player) in assignment.iter().enumerate() {
        holder[player] = p;
    }
    let piece = |m: &PiecewiseConstantMeasure, p: usize| {
        let mut v = cdf(m, (p + 1) % n);
        v.add_scaled(&cdf(m, p), &-Rational::one());
        if p + 1 == n {
            v.constant += Rational::one();
        }
        v
    };
    let values: Vec<Vec<Affine>> = (0..n).map(|i| (0..n).map(|j| piece(&ms[i], holder[j])).collect()).collect();
    let kk = rat(1, k as i64);
    for i in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        for subset in combinations(&others, k - 1) {
            // slack = M_ii (1 − 1/k) − Σ_J' M_ij / k; need −slack − t ≤ 0
            let mut s = Affine::constant(n, Rational::zero());
            s.add_scaled(&values[i][i], &(Rational::one() - &kk));
            for &j in &subset {
                s.add_scaled(&values[i][j], &-kk.clone());
            }
            let mut c: Vec<Rational> = pad(&s).into_iter().map(|x| -x).collect();
            c[t] = -Rational::one();
            le(c, s.constant.clone());
        }
        // d_i − u ≤ 0 and l − d_i ≤ 0
        let d = &values[i][i];
        let mut c = pad(d);
        c[u] = -Rational::one();
        le(c, -d.constant.clone());
        let mut c: Vec<Rational> = pad(d).into_iter().map(|x| -x).collect();
        c[l] = Rational::one();
        le(c, d.constant.clone());
    }
    let m = rows.len();
    let width = core + m;
    let a: Vec<Vec<Rational>> = rows
        .iter()
        .enumerate()
        .map(|(r, (coef, _))| {
            let mut row = coef.clone();
            row.resize(width, Rational::zero());
            row[core + r] = Rational::one();
            row
        })
        .collect();
    let b: Vec<Rational> = rows.into_iter().map(|(_, rhs)| rhs).collect();
    let mut cost = vec![Rational::zero(); width];
    cost[t] = Rational::one();
    cost[u] = Rational::one();
    cost[l] = -Rational::one();
    let sol = simplex::minimize(&a, &b, &cost).ok()?;
    Some((0..n).map(|j| lo[j] + &sol.x[j]).collect())
}

struct Polished {
    v: Rational,
    division: ConnectedDivision,
}

fn exact_score(
    ms: &[PiecewiseConstantMeasure],
    cuts: Vec<Rational>,
    assignment: Vec<usize>,
    k: usize,
) -> Option<Polished> {
    let division = ConnectedDivision::new(Geometry::Pie, cuts, assignment).ok()?;
    let m = sharing_matrix(&Division::Connected(division.clone()), ms).ok()?;
    let v = violation_score_exact(&m, k).ok()?;
    Some(Polished { v, division })
}

fn better(a: &Polished, b: &Option<Polished>) -> bool {
    match b {
        None => true,
        Some(b) => {
            (&a.v, a.division.cuts(), a.division.assignment()) < (&b.v, b.division.cuts(), b.division.assignment())
        }
    }
}

/// Global search for a pie division that is `k`-proportional and equitable
/// under the counterexample measures.
///
/// Every nondecreasing cut vector on the grid is combined with every
/// assignment up to permutations of the interchangeable uniform players. The
/// best candidates then go through coordinate descent with steps `h/2, …,
/// h/2^r` and an exact linear-programming polish inside their breakpoint
/// cells. All grid scores are exact (scaled integers); every reported score
/// is recomputed in rationals.
pub fn certify_pie_impossibility(opts: &PieSearch) -> Result<SearchCertificate, ImpossibilityError> {
    let clock = Clock::start();
    let PieSearch { n, k, grid, refine_rounds, threads } = *opts;
    let ms = pie_counterexample(n)?;
    if n > MAX_SEARCH_N {
        return Err(ImpossibilityError::TooManyPlayers { max: MAX_SEARCH_N, got: n });
    }
    if k < 2 || k > n {
        return Err(FairnessError::KOutOfRange { k, min: 2, n }.into());
    }
    if grid % 6 != 0 {
        return Err(ImpossibilityError::GridMisaligned { grid });
    }
    if grid / 6 + 1 < 3 {
        return Err(ImpossibilityError::GridTooCoarse { grid });
    }
    if refine_rounds > 20 {
        return Err(ImpossibilityError::RefineTooDeep(refine_rounds));
    }
    let g = grid as i64;
    let kernel = PieKernel::new(&ms, n, k, g);
    let found = run_blocks(&kernel, threads);
    let grid_best = found.best[0].clone();
    let grid_v = grid_best.v as f64 / kernel.denominator() as f64;

    let factor = 1i64 << refine_rounds;
    let fine = PieKernel::new(&ms, n, k, g * factor);
    let steps: Vec<i64> = (1..=refine_rounds).map(|r| factor >> r).collect();
    let mut refined: Vec<Candidate> = found
        .best
        .iter()
        .map(|c| {
            let cuts: Vec<i64> = c.cuts.iter().map(|x| x * factor).collect();
            let mut s = Scratch::default();
            fine.load(&cuts, &mut s);
            let v = fine.score(&s, c.a, c.b);
            descend(&fine, Candidate { v, cuts, a: c.a, b: c.b }, &steps)
        })
        .collect();
    refined.sort();
    let refined_v = refined[0].v as f64 / fine.denominator() as f64;

    let fine_g = g * factor;
    let pts = cells(&ms);
    let mut best: Option<Polished> = None;
    let mut programs = 0u64;
    for c in &refined {
        let cuts: Vec<Rational> = c.cuts.iter().map(|&x| rat(x, fine_g)).collect();
        let assignment = c.assignment(n);
        if let Some(p) = exact_score(&ms, cuts.clone(), assignment.clone(), k) {
            if better(&p, &best) {
                best = Some(p);
            }
        }
        let options: Vec<Vec<usize>> = cuts.iter().map(|x| cell_options(&pts, x)).collect();
        let mut region = vec![0usize; n];
        let total: usize = options.iter().map(Vec::len).product();
        for mut code in 0..total {
            for j in 0..n {
                region[j] = options[j][code % options[j].len()];
                code /= options[j].len();
            }
            programs += 1;
            let Some(x) = polish_region(&ms, &pts, &region, &assignment, k) else { continue };
            if let Some(p) = exact_score(&ms, x, assignment.clone(), k) {
                if better(&p, &best) {
                    best = Some(p);
                }
            }
        }
    }
    let best = best.expect("grid candidates are valid divisions");
    let v_star = rational::to_f64(&best.v);
    let mechanism_ok = found.mechanism_confirmed == found.near_feasible;
    let passed =
        if k < n { v_star > POSITIVITY_BAR && best.v.is_positive() && mechanism_ok } else { v_star <= POSITIVITY_BAR };
    Ok(SearchCertificate {
        theorem: Theorem::PieEquitable,
        n,
        k,
        grid,
        refine_rounds,
        divisions_examined: found.divisions,
        assignments_examined: found.divisions * (n * (n - 1)) as u64,
        evidence: Evidence::Pie(PieEvidence {
            grid_v,
            refined_v,
            v_star,
            v_star_exact: best.v,
            best: best.division,
            near_feasible: found.near_feasible,
            mechanism_confirmed: found.mechanism_confirmed,
            polish_programs: programs,
        }),
        passed,
        wall_time_secs: clock.elapsed(),
    })
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Exhaustive check of the cake theorem on a grid: every connected division
/// with cuts on the grid, under every assignment, that is `(n−1)`-proportional
/// must have diagonal `1/n` (up to `h ·` max density) and be Pareto-dominated
/// by [`dominating_division`].
///
/// Players `1..n` are identical, so the verdict of an assignment only depends
/// on which piece player 0 holds; the scan evaluates those `n` classes in
/// scaled integers and then re-checks every full assignment of each hit in
/// exact rationals.
pub fn certify_cake_pareto(n: usize, grid: u32) -> Result<SearchCertificate, ImpossibilityError> {
    let clock = Clock::start();
    if n < 3 {
        return Err(ImpossibilityError::CakeTooFewPlayers { min: 3, got: n });
    }
    if n > MAX_SEARCH_N {
        return Err(ImpossibilityError::TooManyPlayers { max: MAX_SEARCH_N, got: n });
    }
    if !(grid as usize).is_multiple_of(2 * n) {
        return Err(ImpossibilityError::GridMisaligned { grid });
    }
    let ms = cake_counterexample(n)?;
    let k = n - 1;
    let g = grid as i64;
    let l = density_lcd(&ms);
    let tables = Tables::new(&[&ms[0], &ms[1]], g, l);
    let dominator = sharing_matrix(&Division::Connected(dominating_division(n)?), &ms).expect("valid division");
    let tolerance = rat(1, g) * ms[0].max_density();
    let share = rat(1, n as i64);

    let mut evidence = CakeEvidence { proportional_found: 0, diagonal_failures: 0, undominated: 0, first_found: None };
    let mut divisions = 0u64;
    // interior cuts x_1 ≤ … ≤ x_{n−1} in 0..=g, padded with 0 and g
    let mut pts = vec![0i64; n + 1];
    pts[n] = g;
    let mut vals = [[0i64; MAX_SEARCH_N]; 2];
    let mut slacks = [[0i64; MAX_SEARCH_N]; 2];
    loop {
        divisions += 1;
        for t in 0..2 {
            for j in 0..n {
                vals[t][j] = tables.cdf[t][pts[j + 1] as usize] - tables.cdf[t][pts[j] as usize];
            }
            scaled_slacks(&vals[t][..n], tables.scale, k, &mut slacks[t][..n]);
        }
        for a in 0..n {
            let ok = slacks[0][a] >= 0 && (0..n).filter(|&p| p != a).all(|p| slacks[1][p] >= 0);
            if !ok {
                continue;
            }
            let cuts: Vec<Rational> = pts[1..n].iter().map(|&x| rat(x, g)).collect();
            let mut rest: Vec<usize> = (1..n).collect();
            loop {
                let mut it = rest.iter();
                let assignment: Vec<usize> = (0..n).map(|p| if p == a { 0 } else { *it.next().unwrap() }).collect();
                let d = ConnectedDivision::new(Geometry::Cake, cuts.clone(), assignment).expect("grid division");
                let m = sharing_matrix(&Division::Connected(d.clone()), &ms).expect("valid division");
                if fairness::is_k_proportional(&m, k)?.holds {
                    evidence.proportional_found += 1;
                    if m.diagonal().iter().any(|v| (v - &share).abs() > tolerance) {
                        evidence.diagonal_failures += 1;
                    }
                    if !fairness::pareto_dominates(&dominator, &m)? {
                        evidence.undominated += 1;
                    }
                    evidence.first_found.get_or_insert(d);
                }
                if !next_permutation(&mut rest) {
                    break;
                }
            }
        }
        let mut j = n - 1;
        while j > 0 && pts[j] == g {
            j -= 1;
        }
        if j == 0 {
            break;
        }
        pts[j] += 1;
        for i in j + 1..n {
            pts[i] = pts[j];
        }
    }
    let passed = evidence.proportional_found > 0 && evidence.diagonal_failures == 0 && evidence.undominated == 0;
    Ok(SearchCertificate {
        theorem: Theorem::CakePareto,
        n,
        k,
        grid,
        refine_rounds: 0,
        divisions_examined: divisions,
        assignments_examined: divisions * factorial(n),
        evidence: Evidence::Cake(evidence),
        passed,
        wall_time_secs: clock.elapsed(),
    })
}
