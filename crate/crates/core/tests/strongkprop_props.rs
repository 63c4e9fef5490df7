mod common;

use common::*;
use fairdiv_core::divisions::sharing_matrix;
use fairdiv_core::fairness::{is_strong_envy_free, is_strong_k_proportional};
use fairdiv_core::fixtures;
use fairdiv_core::linalg::{rank, transpose};
use fairdiv_core::measures::{common_refinement, measures_equal, Geometry};
use fairdiv_core::rational::{int, rat, Rational};
use fairdiv_core::strongkprop::*;
use fairdiv_core::{Division, PiecewiseConstantMeasure, SharingMatrix};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random measure set in which some players copy earlier ones.
fn measure_set<R: Rng>(rng: &mut R, n: usize, max_cells: usize) -> Vec<PiecewiseConstantMeasure> {
    let mut ms: Vec<PiecewiseConstantMeasure> = Vec::new();
    for _ in 0..n {
        if !ms.is_empty() && rng.gen_bool(0.3) {
            let copy = ms[rng.gen_range(0..ms.len())].clone();
            ms.push(copy);
        } else {
            ms.push(random_measure(rng, Geometry::Cake, max_cells));
        }
    }
    ms
}

/// Independent properness check: each column of `Q` must be a combination of
/// the per-cell density vectors, which is the same as respecting every
/// dependency among the measures.
fn check_proper(q: &ProperMatrix, ms: &[PiecewiseConstantMeasure]) {
    let n = ms.len();
    let r = common_refinement(ms).unwrap();
    let a = &r.densities; // n × cells
    let base = rank(a);
    for i in 0..n {
        assert!(q.entries()[i].iter().sum::<Rational>().is_zero());
    }
    for j in 0..n {
        let mut aug = a.clone();
        for (i, row) in aug.iter_mut().enumerate() {
            row.push(q.get(i, j).clone());
        }
        assert_eq!(rank(&aug), base, "column {j} leaves the span of the densities");
    }
    for i in 0..n {
        for j in 0..n {
            let d = q.get(i, i) - q.get(i, j);
            assert!(!d.is_negative());
            assert_eq!(d.is_zero(), measures_equal(&ms[i], &ms[j]).unwrap());
        }
    }
}

#[test]
fn proper_matrix_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let ms = measure_set(&mut rng, n, 5);
        let q = proper_matrix(&ms).unwrap();
        check_proper(&q, &ms);
    }
    // a linearly dependent but pairwise distinct triple
    let u = PiecewiseConstantMeasure::uniform(Geometry::Cake);
    let left =
        PiecewiseConstantMeasure::new(Geometry::Cake, vec![int(0), rat(1, 2), int(1)], vec![int(2), int(0)]).unwrap();
    let right =
        PiecewiseConstantMeasure::new(Geometry::Cake, vec![int(0), rat(1, 2), int(1)], vec![int(0), int(2)]).unwrap();
    let ms = vec![u, left, right];
    assert_eq!(dependency_nullspace(&ms).unwrap().len(), 1);
    check_proper(&proper_matrix(&ms).unwrap(), &ms);
}

#[test]
fn realize_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..60 {
        let n = rng.gen_range(1..=4);
        let ms = random_measures(&mut rng, n, Geometry::Cake, 4);
        let mut pts: Vec<i64> = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..24)).collect();
        pts.sort_unstable();
        pts.insert(0, 0);
        pts.push(24);
        let mut shares = vec![Vec::new(); n];
        for w in pts.windows(2) {
            shares[rng.gen_range(0..n)].push(fairdiv_core::Interval::cake(rat(w[0], 24), rat(w[1], 24)).unwrap());
        }
        let d = fairdiv_core::GeneralDivision::new(Geometry::Cake, shares).unwrap();
        let m = sharing_matrix(&d.into(), &ms).unwrap();
        let realized = realize_sharing_matrix(m.entries(), &ms).unwrap();
        assert_eq!(sharing_matrix(&realized.into(), &ms).unwrap(), m);
    }
}

#[test]
fn strong_divisions_on_random_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut built = 0;
    for _ in 0..60 {
        let n = rng.gen_range(2..=4);
        let ms = measure_set(&mut rng, n, 4);
        let k = rng.gen_range(2..=n);
        let exists = strong_k_exists(&ms, k).unwrap();
        match strong_k_division(&ms, k) {
            Ok(s) => {
                assert!(exists);
                built += 1;
                assert_eq!(s.matrix.entries(), &perturbed_exact(&s.proper, &s.epsilon));
                let again = sharing_matrix(&Division::General(s.division.clone()), &ms).unwrap();
                assert_eq!(again, s.matrix);
                for k2 in k..=n {
                    assert!(is_strong_k_proportional(&s.matrix, k2).unwrap().holds);
                }
            }
            Err(StrongError::Nonexistent { .. }) => assert!(!exists),
            Err(e) => panic!("{e}"),
        }
    }
    assert!(built > 20);
}

#[test]
fn all_distinct_gives_strong_envy_freeness() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut done = 0;
    while done < 10 {
        let ms = random_measures(&mut rng, 4, Geometry::Cake, 4);
        if equality_classes(&ms).unwrap().largest() > 1 {
            continue;
        }
        let s = strong_k_division(&ms, 2).unwrap();
        assert!(is_strong_envy_free(&s.matrix).holds);
        done += 1;
    }
}

/// Every sharing matrix reachable from cell fractions `λ`, sampled at the
/// vertices (whole cells to single players) and at random interior points.
fn reachable_matrices<R: Rng>(rng: &mut R, ms: &[PiecewiseConstantMeasure]) -> Vec<SharingMatrix> {
    let n = ms.len();
    let r = common_refinement(ms).unwrap();
    let cells = r.cells.len();
    let weights = transpose(&r.weights); // cells × players
    let matrix = |lambda: &[Vec<Rational>]| {
        let rows = (0..n)
            .map(|i| (0..n).map(|j| (0..cells).map(|c| &weights[c][i] * &lambda[c][j]).sum()).collect())
            .collect();
        SharingMatrix::new(rows).unwrap()
    };
    let mut out = Vec::new();
    for code in 0..n.pow(cells as u32) {
        let mut c = code;
        let lambda: Vec<Vec<Rational>> = (0..cells)
            .map(|_| {
                let owner = c % n;
                c /= n;
                (0..n).map(|j| int((j == owner) as i64)).collect()
            })
            .collect();
        out.push(matrix(&lambda));
    }
    for _ in 0..300 {
        let lambda: Vec<Vec<Rational>> = (0..cells)
            .map(|_| {
                let w: Vec<i64> = (0..n).map(|_| rng.gen_range(0..5)).collect();
                let t: i64 = w.iter().sum::<i64>().max(1);
                let mut row: Vec<Rational> = w.iter().map(|&x| rat(x, t)).collect();
                if w.iter().all(|&x| x == 0) {
                    row[0] = int(1);
                }
                row
            })
            .collect();
        out.push(matrix(&lambda));
    }
    out
}

#[test]
fn large_equality_class_blocks_strong_divisions() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let mut instances = 0;
    while instances < 30 {
        let n = rng.gen_range(2..=4);
        let ms = measure_set(&mut rng, n, 3);
        let largest = equality_classes(&ms).unwrap().largest();
        if largest < 2 {
            continue;
        }
        instances += 1;
        for k in 2..=largest.min(n) {
            assert!(!strong_k_exists(&ms, k).unwrap());
            for m in reachable_matrices(&mut rng, &ms) {
                assert!(!is_strong_k_proportional(&m, k).unwrap().holds);
            }
        }
    }
}

#[test]
fn six_player_fixture() {
    let ms = fixtures::six_player();
    let classes = equality_classes(&ms).unwrap();
    assert_eq!(classes.classes(), &[vec![0, 3], vec![1, 4], vec![2, 5]]);
    assert!(!strong_k_exists(&ms, 2).unwrap());
    assert!(strong_k_exists(&ms, 3).unwrap());
    let q = proper_matrix(&ms).unwrap();
    assert_eq!(q.get(0, 3), q.get(0, 0));
    assert!(q.get(0, 1) < q.get(0, 0));
    let s = strong_k_division(&ms, 3).unwrap();
    assert!(is_strong_k_proportional(&s.matrix, 3).unwrap().holds);
    assert!(matches!(strong_k_division(&ms, 2), Err(StrongError::Nonexistent { k: 2, .. })));
}

#[test]
fn four_player_matrix_is_realized() {
    let ms = fixtures::four_player();
    let target = fixtures::four_player_matrix();
    let d = realize_sharing_matrix(&target, &ms).unwrap();
    let m = sharing_matrix(&d.into(), &ms).unwrap();
    assert_eq!(m.entries(), &target);
    assert!(measures_equal(&ms[0], &ms[3]).unwrap());
}
