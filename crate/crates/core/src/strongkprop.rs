//! Strong `k`-proportionality: deciding existence from the equality classes
//! of the measures, and building a division by perturbing the exact division
//! along a proper matrix.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::divisions::{sharing_matrix, Division, GeneralDivision, MatrixError, SharingMatrix};
use crate::fairness;
use crate::linalg::{self, RationalMatrix};
use crate::measures::{self, common_refinement, Interval, MeasureError, PiecewiseConstantMeasure, Refinement};
use crate::rational::{self, Rational};
use crate::simplex::{self, LpError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StrongError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("need at least {min} players, got {got}")]
    TooFewPlayers { min: usize, got: usize },
    #[error("k = {k} outside [2, {n}]")]
    KOutOfRange { k: usize, n: usize },
    #[error(
        "no strong {k}-proportional division exists: players {class:?} share one measure, and summing \
         their strict inequalities over those {k} shares gives μ(S) > μ(S)"
    )]
    Nonexistent { k: usize, class: Vec<usize> },
    #[error("constructed matrix is not proper: {0}")]
    NotProper(ProperViolation),
    #[error("target is not a sharing matrix: {0}")]
    Target(#[from] MatrixError),
    #[error("target has {got} rows but there are {expected} measures")]
    TargetSize { expected: usize, got: usize },
    #[error("target matrix is not realizable (phase-one residual {residual})")]
    Infeasible { residual: Rational },
    #[error("no realizable ε found down to ε_max·2^-{halvings} (ε_max = {eps_max}); solver limitation")]
    EpsilonFloor { eps_max: Rational, halvings: u32 },
    #[error("linear program failed: {0}")]
    Lp(LpError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProperViolation {
    RowSum { row: usize },
    Dependency { column: usize },
    Dominance { row: usize, col: usize },
}

impl core::fmt::Display for ProperViolation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ProperViolation::RowSum { row } => write!(f, "row {row} does not sum to 0"),
            ProperViolation::Dependency { column } => {
                write!(f, "column {column} violates a linear dependency of the measures")
            }
            ProperViolation::Dominance { row, col } => {
                write!(f, "Q[{row}][{row}] ≥ Q[{row}][{col}] with equality iff equal measures fails")
            }
        }
    }
}

/// Basis of `{λ : Σ λ_i f_i = 0 a.e.}`.
pub fn dependency_nullspace(ms: &[PiecewiseConstantMeasure]) -> Result<Vec<Vec<Rational>>, MeasureError> {
    let r = common_refinement(ms)?;
    let by_cell = linalg::transpose(&r.densities);
    Ok(linalg::nullspace(&by_cell, ms.len()))
}

/// Players grouped by a.e. equality of their measures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EqualityClasses {
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl EqualityClasses {
    /// Classes ordered by their smallest member.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, player: usize) -> usize {
        self.class_of[player]
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    pub fn largest(&self) -> usize {
        self.classes.iter().map(Vec::len).max().unwrap_or(0)
    }
}

pub fn equality_classes(ms: &[PiecewiseConstantMeasure]) -> Result<EqualityClasses, MeasureError> {
    let r = common_refinement(ms)?;
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = Vec::with_capacity(ms.len());
    for i in 0..ms.len() {
        match classes.iter().position(|c| r.densities[c[0]] == r.densities[i]) {
            Some(c) => {
                classes[c].push(i);
                class_of.push(c);
            }
            None => {
                class_of.push(classes.len());
                classes.push(vec![i]);
            }
        }
    }
    Ok(EqualityClasses { classes, class_of })
}

fn check_k(n: usize, k: usize) -> Result<(), StrongError> {
    if k < 2 || k > n {
        return Err(StrongError::KOutOfRange { k, n });
    }
    Ok(())
}

/// A strong `k`-proportional division exists iff no `k` players share one
/// measure, i.e. the largest equality class has at most `k − 1` members.
pub fn strong_k_exists(ms: &[PiecewiseConstantMeasure], k: usize) -> Result<bool, StrongError> {
    check_k(ms.len(), k)?;
    Ok(equality_classes(ms)?.largest() < k)
}

/// Matrix with zero row sums whose columns respect every linear dependency
/// among the measures, and with `Q[i][i] ≥ Q[i][j]`, equality exactly when
/// `μ_i = μ_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProperMatrix {
    entries: RationalMatrix,
}

impl ProperMatrix {
    pub fn entries(&self) -> &RationalMatrix {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }
}

/// `Q[i][j] = c_i − D[i][j]/2`, where `D[i][j] = ∫(f_i − f_j)²` and
/// `c_i = (1/n) Σ_j D[i][j]/2`. The result is re-verified before returning.
pub fn proper_matrix(ms: &[PiecewiseConstantMeasure]) -> Result<ProperMatrix, StrongError> {
    let n = ms.len();
    if n < 2 {
        return Err(StrongError::TooFewPlayers { min: 2, got: n });
    }
    let g = measures::gram(ms)?;
    let half = rational::rat(1, 2);
    let dist: RationalMatrix =
        (0..n).map(|i| (0..n).map(|j| &g[i][i] - &g[i][j] * rational::int(2) + &g[j][j]).collect()).collect();
    let inv_n = rational::rat(1, n as i64);
    let entries = (0..n)
        .map(|i| {
            let c = dist[i].iter().sum::<Rational>() * &half * &inv_n;
            (0..n).map(|j| &c - &dist[i][j] * &half).collect()
        })
        .collect();
    let q = ProperMatrix { entries };
    verify_proper(&q, ms).map_err(StrongError::NotProper)?;
    Ok(q)
}

/// Checks the three properness conditions against the measures.
pub fn verify_proper(q: &ProperMatrix, ms: &[PiecewiseConstantMeasure]) -> Result<(), ProperViolation> {
    let n = q.n();
    for (row, r) in q.entries.iter().enumerate() {
        if !r.iter().sum::<Rational>().is_zero() {
            return Err(ProperViolation::RowSum { row });
        }
    }
    let basis = dependency_nullspace(ms).expect("measures already validated");
    for lambda in &basis {
        for column in 0..n {
            let s: Rational = (0..n).map(|i| &lambda[i] * &q.entries[i][column]).sum();
            if !s.is_zero() {
                return Err(ProperViolation::Dependency { column });
            }
        }
    }
    let classes = equality_classes(ms).expect("measures already validated");
    for row in 0..n {
        for col in 0..n {
            let d = &q.entries[row][row] - &q.entries[row][col];
            if d.is_negative() || d.is_zero() != classes.same(row, col) {
                return Err(ProperViolation::Dominance { row, col });
            }
        }
    }
    Ok(())
}

/// Lays out per-cell fractions: in cell `c`, players take consecutive slices
/// of length `fractions[c][j] · length(c)` in index order.
fn layout(r: &Refinement, fractions: &[Vec<Rational>], n: usize) -> GeneralDivision {
    let mut shares: Vec<Vec<Interval>> = vec![Vec::new(); n];
    for (cell, row) in r.cells.iter().zip(fractions) {
        let len = cell.length();
        let mut pos = cell.start().clone();
        for (j, f) in row.iter().enumerate() {
            if !f.is_positive() {
                continue;
            }
            let end = &pos + f * &len;
            match shares[j].last_mut() {
                Some(prev) if *prev.end() == pos => {
                    *prev = Interval::new(r.geometry, prev.start().clone(), end.clone()).expect("inside [0,1]");
                }
                _ => shares[j].push(Interval::new(r.geometry, pos.clone(), end.clone()).expect("inside [0,1]")),
            }
            pos = end;
        }
    }
    GeneralDivision::new(r.geometry, shares).expect("cell slices tile the cake")
}

/// Every player receives a `1/n` slice of every refinement cell, so every
/// player values every share at exactly `1/n`.
pub fn exact_division(ms: &[PiecewiseConstantMeasure]) -> Result<GeneralDivision, StrongError> {
    let n = ms.len();
    if n == 0 {
        return Err(StrongError::TooFewPlayers { min: 1, got: 0 });
    }
    let r = common_refinement(ms)?;
    let f = rational::rat(1, n as i64);
    let fractions = vec![vec![f; n]; r.cells.len()];
    Ok(layout(&r, &fractions, n))
}

/// Finds a division whose sharing matrix is exactly `target`.
///
/// Unknowns are the fractions `λ[c][j] ≥ 0` of refinement cell `c` handed to
/// player `j`, with `Σ_j λ[c][j] = 1` and `Σ_c W[i][c] λ[c][j] = target[i][j]`.
/// Since densities are constant on cells these fractions reach every
/// achievable sharing matrix, so infeasibility means no division exists.
pub fn realize_sharing_matrix(
    target: &RationalMatrix,
    ms: &[PiecewiseConstantMeasure],
) -> Result<GeneralDivision, StrongError> {
    let target = SharingMatrix::new(target.clone())?;
    let n = ms.len();
    if target.n() != n {
        return Err(StrongError::TargetSize { expected: n, got: target.n() });
    }
    let r = common_refinement(ms)?;
    let cells = r.cells.len();
    let vars = cells * n;
    let mut a: RationalMatrix = Vec::with_capacity(cells + n * n);
    let mut b = Vec::with_capacity(cells + n * n);
    for c in 0..cells {
        let mut row = vec![Rational::zero(); vars];
        for j in 0..n {
            row[c * n + j] = Rational::one();
        }
        a.push(row);
        b.push(Rational::one());
    }
    for i in 0..n {
        for j in 0..n {
            let mut row = vec![Rational::zero(); vars];
            for c in 0..cells {
                row[c * n + j] = r.weights[i][c].clone();
            }
            a.push(row);
            b.push(target.get(i, j).clone());
        }
    }
    let x = simplex::find_feasible(&a, &b, vars).map_err(|e| match e {
        LpError::Infeasible { residual } => StrongError::Infeasible { residual },
        other => StrongError::Lp(other),
    })?;
    let fractions: Vec<Vec<Rational>> = x.chunks(n).map(<[Rational]>::to_vec).collect();
    Ok(layout(&r, &fractions, n))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongDivision {
    pub division: GeneralDivision,
    pub epsilon: Rational,
    pub proper: ProperMatrix,
    /// `E + εQ`, equal to the sharing matrix of `division`.
    pub matrix: SharingMatrix,
    pub halvings: u32,
}

pub const EPSILON_HALVINGS: u32 = 30;

/// Largest `ε` keeping every entry of `E + εQ` inside `[0,1]`.
pub fn epsilon_max(q: &ProperMatrix) -> Option<Rational> {
    let n = q.n();
    let share = rational::rat(1, n as i64);
    let rest = Rational::one() - &share;
    q.entries
        .iter()
        .flatten()
        .filter(|v| !v.is_zero())
        .map(|v| if v.is_positive() { &rest / v } else { &share / -v })
        .min()
}

pub fn perturbed_exact(q: &ProperMatrix, epsilon: &Rational) -> RationalMatrix {
    let share = rational::rat(1, q.n() as i64);
    q.entries.iter().map(|row| row.iter().map(|v| &share + epsilon * v).collect()).collect()
}

/// Builds a strong `k`-proportional division: realizes `E + εQ` for a proper
/// matrix `Q`, halving `ε` from its largest admissible value until the matrix
/// is realizable.
pub fn strong_k_division(ms: &[PiecewiseConstantMeasure], k: usize) -> Result<StrongDivision, StrongError> {
    let n = ms.len();
    check_k(n, k)?;
    let classes = equality_classes(ms)?;
    if let Some(class) = classes.classes().iter().find(|c| c.len() >= k) {
        return Err(StrongError::Nonexistent { k, class: class.clone() });
    }
    let proper = proper_matrix(ms)?;
    let eps_max = epsilon_max(&proper).expect("distinct measures give a nonzero proper matrix");
    let mut epsilon = eps_max.clone();
    for halvings in 0..=EPSILON_HALVINGS {
        let target = perturbed_exact(&proper, &epsilon);
        match realize_sharing_matrix(&target, ms) {
            Ok(division) => {
                let matrix =
                    sharing_matrix(&Division::General(division.clone()), ms).expect("realized divisions are valid");
                debug_assert_eq!(matrix.entries(), &target);
                debug_assert!(fairness::is_strong_k_proportional(&matrix, k).expect("k checked").holds);
                return Ok(StrongDivision { division, epsilon, proper, matrix, halvings });
            }
            Err(StrongError::Infeasible { .. }) => epsilon /= rational::int(2),
            Err(e) => return Err(e),
        }
    }
    Err(StrongError::EpsilonFloor { eps_max, halvings: EPSILON_HALVINGS })
}
