//! Built-in scenarios: the two counterexample families, a six-player instance
//! with three pairs of identical players, and measures under which the 4×4
//! example sharing matrix is achievable.

use alloc::vec;
use alloc::vec::Vec;

use crate::measures::{Geometry, Interval, PiecewiseConstantMeasure};
use crate::rational::{int, rat, Rational};

/// `(start, end, density)` with endpoints as `(numerator, denominator)`.
type Piece = ((i64, i64), (i64, i64), Rational);

fn pieces(geometry: Geometry, parts: &[Piece]) -> PiecewiseConstantMeasure {
    let parts: Vec<(Interval, Rational)> = parts
        .iter()
        .map(|(s, e, v)| (Interval::new(geometry, rat(s.0, s.1), rat(e.0, e.1)).expect("fixture interval"), v.clone()))
        .collect();
    PiecewiseConstantMeasure::from_pieces(geometry, &parts).expect("fixture measure")
}

/// Pie densities `6/5` off `[0,1/6]`, `6/5` off `[1/2,2/3]`, then `n − 2`
/// uniform players.
pub fn pie_measures(n: usize) -> Vec<PiecewiseConstantMeasure> {
    let g = Geometry::Pie;
    let six_fifths = rat(6, 5);
    let mut ms = vec![pieces(g, &[((1, 6), (1, 1), six_fifths.clone())]), pieces(g, &[((2, 3), (1, 2), six_fifths)])];
    ms.extend((2..n).map(|_| PiecewiseConstantMeasure::uniform(g)));
    ms
}

/// Cake: player 0 has density 2 on `[0,1/2n]`, 0 on `(1/2n,1/n)` and 1 on
/// `[1/n,1]`; everyone else is uniform.
pub fn cake_measures(n: usize) -> Vec<PiecewiseConstantMeasure> {
    let n = n as i64;
    let first = PiecewiseConstantMeasure::new(
        Geometry::Cake,
        vec![int(0), rat(1, 2 * n), rat(1, n), int(1)],
        vec![int(2), int(0), int(1)],
    )
    .expect("normalized: 2/2n + 1 − 1/n = 1");
    let mut ms = vec![first];
    ms.extend((1..n).map(|_| PiecewiseConstantMeasure::uniform(Geometry::Cake)));
    ms
}

/// Six players with `μ_0 = μ_3`, `μ_1 = μ_4`, `μ_2 = μ_5` and the three
/// distinct measures pairwise different.
pub fn six_player() -> Vec<PiecewiseConstantMeasure> {
    let g = Geometry::Cake;
    let a = PiecewiseConstantMeasure::uniform(g);
    let b = pieces(g, &[((0, 1), (1, 2), int(2))]);
    let c = pieces(g, &[((1, 3), (1, 1), rat(3, 2))]);
    vec![a.clone(), b.clone(), c.clone(), a, b, c]
}

/// Quarter-based cake measures: player `i < 3` values quarter `i` at `1/3`
/// and the last quarter at `2/3`; player 3 copies player 0.
pub fn four_player() -> Vec<PiecewiseConstantMeasure> {
    let g = Geometry::Cake;
    let player = |q: i64| pieces(g, &[((q, 4), (q + 1, 4), rat(4, 3)), ((3, 4), (1, 1), rat(8, 3))]);
    vec![player(0), player(1), player(2), player(0)]
}

/// The 4×4 sharing matrix that is 3- and 4-proportional but not
/// 2-proportional.
pub fn four_player_matrix() -> Vec<Vec<Rational>> {
    let third = rat(1, 3);
    let two_thirds = rat(2, 3);
    let z = int(0);
    vec![
        vec![third.clone(), z.clone(), z.clone(), two_thirds.clone()],
        vec![z.clone(), third.clone(), z.clone(), two_thirds.clone()],
        vec![z.clone(), z.clone(), third.clone(), two_thirds.clone()],
        vec![third, z.clone(), z, two_thirds],
    ]
}
