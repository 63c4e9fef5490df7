//! Dense exact linear algebra over the rationals.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::rational::Rational;

pub type RationalMatrix = Vec<Vec<Rational>>;

pub fn zeros(rows: usize, cols: usize) -> RationalMatrix {
    vec![vec![Rational::zero(); cols]; rows]
}

/// Reduces `a` to reduced row echelon form in place and returns the pivot
/// column of each nonzero row.
pub fn rref(a: &mut RationalMatrix) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = Rational::one() / &a[r][c];
        for v in a[r].iter_mut() {
            if !v.is_zero() {
                *v *= &inv;
            }
        }
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let factor = a[i][c].clone();
            for j in c..cols {
                if a[r][j].is_zero() {
                    continue;
                }
                let delta = &factor * &a[r][j];
                a[i][j] -= delta;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(a: &RationalMatrix) -> usize {
    let mut m = a.clone();
    rref(&mut m).len()
}

/// Basis of `{x : a x = 0}`; one vector per free column, with a 1 in that
/// column.
pub fn nullspace(a: &RationalMatrix, cols: usize) -> Vec<Vec<Rational>> {
    let mut m = a.clone();
    let pivots = rref(&mut m);
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -m[row][free].clone();
            }
            v
        })
        .collect()
}

pub fn mat_vec(a: &RationalMatrix, x: &[Rational]) -> Vec<Rational> {
    a.iter().map(|row| row.iter().zip(x).map(|(u, v)| u * v).sum()).collect()
}

pub fn transpose(a: &RationalMatrix) -> RationalMatrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}
