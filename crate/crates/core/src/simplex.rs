//! Exact two-phase simplex for problems in standard form
//! `min cᵀx  s.t.  A x = b, x ≥ 0`.
//!
//! Dense tableau, Bland's rule for entering and leaving variables, so the
//! method terminates on degenerate problems. Desk-scale only.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("infeasible: phase-one optimum {residual} > 0")]
    Infeasible { residual: Rational },
    #[error("objective unbounded below")]
    Unbounded,
    #[error("dimension mismatch: {0}")]
    Dimensions(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<Rational>,
    pub objective: Rational,
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    width: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rational {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, cost: &mut [Rational], r: usize, c: usize) {
        let inv = self.rows[r][c].recip();
        for v in self.rows[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        let pivot_row = self.rows[r].clone();
        let support: Vec<usize> = (0..=self.width).filter(|&j| !pivot_row[j].is_zero()).collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for &j in &support {
                row[j] -= &factor * &pivot_row[j];
            }
        }
        if !cost[c].is_zero() {
            let factor = cost[c].clone();
            for &j in &support {
                cost[j] -= &factor * &pivot_row[j];
            }
        }
        self.basis[r] = c;
    }

    /// Runs simplex iterations on the reduced-cost row `cost` (last entry is
    /// minus the current objective) restricted to `allowed` columns.
    fn optimize(&mut self, cost: &mut [Rational], allowed: &[bool]) -> Result<(), LpError> {
        loop {
            let Some(enter) = (0..self.width).find(|&j| allowed[j] && cost[j].is_negative()) else {
                return Ok(());
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(cost, r, enter);
        }
    }
}

fn check_dims(a: &[Vec<Rational>], b: &[Rational], n: usize) -> Result<(), LpError> {
    if a.len() != b.len() {
        return Err(LpError::Dimensions("rows of A and length of b differ"));
    }
    if a.iter().any(|row| row.len() != n) {
        return Err(LpError::Dimensions("ragged constraint matrix"));
    }
    Ok(())
}

/// Phase one. Returns a tableau whose basis contains no artificial columns.
fn phase_one(a: &[Vec<Rational>], b: &[Rational], n: usize) -> Result<Tableau, LpError> {
    let m = a.len();
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for (i, (row, rhs)) in a.iter().zip(b).enumerate() {
        let flip = rhs.is_negative();
        let mut t = vec![Rational::zero(); width + 1];
        for (j, v) in row.iter().enumerate() {
            t[j] = if flip { -v.clone() } else { v.clone() };
        }
        t[n + i] = Rational::from_integer(1.into());
        t[width] = if flip { -rhs.clone() } else { rhs.clone() };
        rows.push(t);
    }
    let mut cost = vec![Rational::zero(); width + 1];
    for row in &rows {
        for j in (0..n).chain(core::iter::once(width)) {
            if !row[j].is_zero() {
                cost[j] -= &row[j];
            }
        }
    }
    let mut tab = Tableau { rows, basis: (n..n + m).collect(), width };
    let allowed = vec![true; width];
    tab.optimize(&mut cost, &allowed)?;
    let residual = -cost[width].clone();
    if residual.is_positive() {
        return Err(LpError::Infeasible { residual });
    }
    // Drive remaining artificials out of the basis; rows where that is
    // impossible are redundant and get dropped.
    let mut i = 0;
    while i < tab.rows.len() {
        if tab.basis[i] < n {
            i += 1;
            continue;
        }
        match (0..n).find(|&j| !tab.rows[i][j].is_zero()) {
            Some(j) => {
                tab.pivot(&mut cost, i, j);
                i += 1;
            }
            None => {
                tab.rows.remove(i);
                tab.basis.remove(i);
            }
        }
    }
    Ok(tab)
}

fn extract(tab: &Tableau, n: usize) -> Vec<Rational> {
    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.rhs(i).clone();
        }
    }
    x
}

/// Any `x ≥ 0` with `A x = b`.
pub fn find_feasible(a: &[Vec<Rational>], b: &[Rational], n: usize) -> Result<Vec<Rational>, LpError> {
    check_dims(a, b, n)?;
    let tab = phase_one(a, b, n)?;
    Ok(extract(&tab, n))
}

/// Minimizes `cᵀx` over `{x ≥ 0 : A x = b}`; the solution is a vertex.
pub fn minimize(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Result<Solution, LpError> {
    let n = c.len();
    check_dims(a, b, n)?;
    let mut tab = phase_one(a, b, n)?;
    let width = tab.width;
    let mut cost = vec![Rational::zero(); width + 1];
    cost[..n].clone_from_slice(c);
    for (i, &bv) in tab.basis.iter().enumerate() {
        if c[bv].is_zero() {
            continue;
        }
        let cb = c[bv].clone();
        for j in 0..=width {
            if !tab.rows[i][j].is_zero() {
                cost[j] -= &cb * &tab.rows[i][j];
            }
        }
    }
    let mut allowed = vec![false; width];
    allowed[..n].fill(true);
    tab.optimize(&mut cost, &allowed)?;
    let x = extract(&tab, n);
    let objective = x.iter().zip(c).map(|(u, v)| u * v).sum();
    Ok(Solution { x, objective })
}
