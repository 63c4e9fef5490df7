#![allow(dead_code)]

use fairdiv_core::measures::{Geometry, PiecewiseConstantMeasure};
use fairdiv_core::rational::{int, rat, Rational};
use fairdiv_core::SharingMatrix;
use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

/// Sharing matrix whose row `i` is proportional to `weights[i]` (an all-zero
/// row becomes the unit vector at `i`).
pub fn matrix_from_weights(weights: &[Vec<u32>]) -> SharingMatrix {
    let n = weights.len();
    let rows = weights
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let total: u32 = w.iter().sum();
            if total == 0 {
                (0..n).map(|j| int((i == j) as i64)).collect()
            } else {
                w.iter().map(|&x| rat(x as i64, total as i64)).collect()
            }
        })
        .collect();
    SharingMatrix::new(rows).unwrap()
}

/// Rows drawn from a small integer simplex, so ties and zeros are common.
pub fn matrix_strategy(sizes: core::ops::RangeInclusive<usize>) -> impl Strategy<Value = SharingMatrix> {
    sizes.prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(0u32..6, n), n).prop_map(|w| matrix_from_weights(&w))
    })
}

pub fn random_matrix<R: Rng>(rng: &mut R, n: usize) -> SharingMatrix {
    let w: Vec<Vec<u32>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..6)).collect()).collect();
    matrix_from_weights(&w)
}

/// Random piecewise-constant measure with at most `max_cells` cells on the
/// grid `1/12`, some cells possibly of density zero.
pub fn random_measure<R: Rng>(rng: &mut R, geometry: Geometry, max_cells: usize) -> PiecewiseConstantMeasure {
    let cells = rng.gen_range(1..=max_cells);
    let mut inner: Vec<i64> = Vec::new();
    while inner.len() < cells - 1 {
        let x = rng.gen_range(1..12);
        if !inner.contains(&x) {
            inner.push(x);
        }
    }
    inner.sort_unstable();
    let mut pts = vec![0];
    pts.extend(inner);
    pts.push(12);
    let mut weights: Vec<i64> = (0..cells).map(|_| rng.gen_range(0..4)).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[rng.gen_range(0..cells)] = 1;
    }
    let mass: i64 = pts.windows(2).zip(&weights).map(|(w, &d)| (w[1] - w[0]) * d).sum();
    let values = weights.iter().map(|&w| rat(w * 12, mass)).collect();
    PiecewiseConstantMeasure::new(geometry, pts.iter().map(|&p| rat(p, 12)).collect(), values).unwrap()
}

pub fn random_measures<R: Rng>(
    rng: &mut R,
    n: usize,
    geometry: Geometry,
    max_cells: usize,
) -> Vec<PiecewiseConstantMeasure> {
    (0..n).map(|_| random_measure(rng, geometry, max_cells)).collect()
}

/// Subsets of `0..n` as bit masks.
pub fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&j| mask >> j & 1 == 1).collect()
}

/// Minimal slack of `M_ii − (1/k) Σ_{j∈J} M_ij` over every `J ∋ i`, `|J| = k`.
pub fn brute_subset_slack(m: &SharingMatrix, k: usize) -> Rational {
    let n = m.n();
    let mut best: Option<Rational> = None;
    for i in 0..n {
        for mask in 0u32..1 << n {
            let j = members(mask, n);
            if j.len() != k || !j.contains(&i) {
                continue;
            }
            let avg: Rational = j.iter().map(|&x| m.get(i, x)).sum::<Rational>() / int(k as i64);
            let s = m.get(i, i) - avg;
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
    }
    best.unwrap()
}

/// The same inequality in the form "does not envy the average of any
/// `k − 1` others": `M_ii − (1/(k−1)) Σ_{j∈J′} M_ij ≥ 0`.
pub fn brute_prime_form(m: &SharingMatrix, k: usize, strict: bool) -> bool {
    let n = m.n();
    (0..n).all(|i| {
        (0u32..1 << n).all(|mask| {
            let j = members(mask, n);
            if j.len() != k - 1 || j.contains(&i) {
                return true;
            }
            let s = m.get(i, i) - j.iter().map(|&x| m.get(i, x)).sum::<Rational>() / int(k as i64 - 1);
            if strict {
                s > Rational::zero()
            } else {
                s >= Rational::zero()
            }
        })
    })
}

/// `Σ_{j∉S} M_ij ≤ bound(|S|)` for all `S`, `|S| ≤ k`, `i ∈ S`.
pub fn brute_complement(m: &SharingMatrix, k: usize, bound: impl Fn(usize) -> Rational) -> bool {
    let n = m.n();
    (1u32..1 << n).all(|mask| {
        let s = members(mask, n);
        s.len() > k
            || s.iter().all(|&i| {
                let outside: Rational = (0..n).filter(|j| !s.contains(j)).map(|j| m.get(i, j)).sum();
                outside <= bound(s.len())
            })
    })
}
