mod common;

use common::*;
use fairdiv_core::divisions::{pie_rotate, sharing_matrix};
use fairdiv_core::measures::{common_refinement, gram, measures_equal, Geometry, Interval};
use fairdiv_core::rational::{int, rat, Rational};
use fairdiv_core::{ConnectedDivision, Division, GeneralDivision};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_cuts<R: Rng>(rng: &mut R, count: usize) -> Vec<Rational> {
    let mut c: Vec<i64> = (0..count).map(|_| rng.gen_range(0..24)).collect();
    c.sort_unstable();
    c.into_iter().map(|x| rat(x, 24)).collect()
}

fn random_connected<R: Rng>(rng: &mut R, geometry: Geometry, n: usize) -> ConnectedDivision {
    let cuts = match geometry {
        Geometry::Cake => random_cuts(rng, n - 1),
        Geometry::Pie => random_cuts(rng, n),
    };
    let mut assignment: Vec<usize> = (0..n).collect();
    assignment.shuffle(rng);
    ConnectedDivision::new(geometry, cuts, assignment).unwrap()
}

/// Cake chopped at random grid points, pieces handed to random players.
fn random_general<R: Rng>(rng: &mut R, n: usize) -> GeneralDivision {
    let pieces = rng.gen_range(1..8);
    let mut pts = random_cuts(rng, pieces - 1);
    pts.insert(0, int(0));
    pts.push(int(1));
    let mut shares = vec![Vec::new(); n];
    for w in pts.windows(2) {
        shares[rng.gen_range(0..n)].push(Interval::cake(w[0].clone(), w[1].clone()).unwrap());
    }
    GeneralDivision::new(Geometry::Cake, shares).unwrap()
}

#[test]
fn sharing_matrices_are_stochastic() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for round in 0..150 {
        let geometry = if round % 2 == 0 { Geometry::Cake } else { Geometry::Pie };
        let n = rng.gen_range(1..6);
        let ms = random_measures(&mut rng, n, geometry, 5);
        let d = random_connected(&mut rng, geometry, n);
        let m = sharing_matrix(&d.clone().into(), &ms).unwrap();
        for i in 0..n {
            assert_eq!(m.row(i).iter().sum::<Rational>(), Rational::one());
        }
        // uniform row equals piece lengths
        let lengths: Vec<Rational> = d.shares().iter().map(|s| s[0].length()).collect();
        let u = sharing_matrix(&d.clone().into(), &vec![fairdiv_core::PiecewiseConstantMeasure::uniform(geometry); n])
            .unwrap();
        assert_eq!(u.row(0), &lengths[..]);
        assert_eq!(lengths.iter().sum::<Rational>(), Rational::one());
        // connected → general → connected keeps the matrix
        let general = d.to_general();
        assert_eq!(sharing_matrix(&Division::General(general.clone()), &ms).unwrap(), m);
        if let Some(back) = general.to_connected() {
            assert_eq!(sharing_matrix(&back.into(), &ms).unwrap(), m);
        }
    }
}

#[test]
fn general_divisions_are_stochastic() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let n = rng.gen_range(1..5);
        let ms = random_measures(&mut rng, n, Geometry::Cake, 4);
        let d = random_general(&mut rng, n);
        let m = sharing_matrix(&d.into(), &ms).unwrap();
        for i in 0..n {
            assert_eq!(m.row(i).iter().sum::<Rational>(), Rational::one());
        }
    }
}

#[test]
fn measure_is_additive() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let geometry = if rng.gen() { Geometry::Cake } else { Geometry::Pie };
        let m = random_measure(&mut rng, geometry, 5);
        let mut pts = random_cuts(&mut rng, 3);
        pts.insert(0, int(0));
        pts.push(int(1));
        let parts: Vec<Interval> =
            pts.windows(2).map(|w| Interval::new(geometry, w[0].clone(), w[1].clone()).unwrap()).collect();
        let total: Rational = parts.iter().map(|p| m.value(p)).sum();
        assert_eq!(total, Rational::one());
        assert_eq!(m.measure_of(&parts).unwrap(), Rational::one());
        if geometry == Geometry::Pie {
            // a wrapping arc is the sum of its two segments
            let a = pts[2].clone();
            let b = pts[1].clone();
            if a > b {
                let arc = Interval::new(geometry, a.clone(), b.clone()).unwrap();
                assert_eq!(m.value(&arc), m.between(&a, &int(1)) + m.between(&int(0), &b));
            }
        }
    }
}

#[test]
fn refinement_weights_and_gram() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let n = rng.gen_range(1..5);
        let ms = random_measures(&mut rng, n, Geometry::Cake, 5);
        let r = common_refinement(&ms).unwrap();
        for (i, m) in ms.iter().enumerate() {
            assert_eq!(r.weights[i].iter().sum::<Rational>(), Rational::one());
            for (c, cell) in r.cells.iter().enumerate() {
                assert_eq!(m.value(cell), r.weights[i][c]);
                // density is constant on the cell
                assert_eq!(m.density_at(cell.start()), r.densities[i][c]);
            }
        }
        let g = gram(&ms).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(g[i][j], g[j][i]);
                let d = &g[i][i] - &g[i][j] * int(2) + &g[j][j];
                assert_eq!(d.is_zero(), measures_equal(&ms[i], &ms[j]).unwrap());
            }
        }
    }
}

#[test]
fn rotation_preserves_lengths() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let uniform = vec![fairdiv_core::PiecewiseConstantMeasure::uniform(Geometry::Pie); 4];
    for _ in 0..100 {
        let d = random_connected(&mut rng, Geometry::Pie, 4);
        let t = rat(rng.gen_range(0..48), 24);
        let r = pie_rotate(&d, &t).unwrap();
        let m = sharing_matrix(&d.clone().into(), &uniform).unwrap();
        assert_eq!(sharing_matrix(&r.into(), &uniform).unwrap(), m);
    }
    let d = ConnectedDivision::new(Geometry::Pie, vec![int(0), rat(1, 3), rat(2, 3)], vec![0, 1, 2]).unwrap();
    assert_eq!(pie_rotate(&d, &int(1)).unwrap(), d);
}
