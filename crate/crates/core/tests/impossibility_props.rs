use fairdiv_core::divisions::sharing_matrix;
use fairdiv_core::fairness::{is_k_proportional, pareto_dominates};
use fairdiv_core::impossibility::*;
use fairdiv_core::measures::Geometry;
use fairdiv_core::rational::{rat, to_f64, Rational};
use fairdiv_core::{ConnectedDivision, Division};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn float_score_agrees_with_exact_on_grid() {
    let ms = pie_counterexample(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..300 {
        let mut cuts: Vec<i64> = (0..5).map(|_| rng.gen_range(0..60)).collect();
        cuts.sort_unstable();
        let mut assignment: Vec<usize> = (0..5).collect();
        assignment.shuffle(&mut rng);
        let d = ConnectedDivision::new(Geometry::Pie, cuts.iter().map(|&c| rat(c, 60)).collect(), assignment).unwrap();
        let m = sharing_matrix(&Division::Connected(d.clone()), &ms).unwrap();
        for k in [4, 5] {
            let exact = violation_score_exact(&m, k).unwrap();
            let float = violation_score(&m.to_f64(), k);
            assert!((to_f64(&exact) - float).abs() <= 1e-12);
            assert_eq!(violation_score_pie(d.cuts(), d.assignment(), &ms, k).unwrap(), exact);
            // zero exactly on k-proportional and equitable divisions
            let fair = is_k_proportional(&m, k).unwrap().holds && m.diagonal().iter().all(|v| *v == m.diagonal()[0]);
            assert_eq!(exact.is_zero(), fair);
        }
    }
}

fn cake_division(n: usize, first: Rational) -> ConnectedDivision {
    let rest = (Rational::from_integer(1.into()) - &first) / Rational::from_integer((n as i64 - 1).into());
    let cuts = (0..n - 1).map(|i| &first + &rest * Rational::from_integer((i as i64).into())).collect();
    ConnectedDivision::cake_in_order(cuts).unwrap()
}

#[test]
fn cake_characterization() {
    for n in 3..=6 {
        let ms = cake_counterexample(n).unwrap();
        let dominator = sharing_matrix(&dominating_division(n).unwrap().into(), &ms).unwrap();
        let exact = sharing_matrix(&cake_division(n, rat(1, n as i64)).into(), &ms).unwrap();
        assert!(is_k_proportional(&exact, n - 1).unwrap().holds);
        assert!(pareto_dominates(&dominator, &exact).unwrap());
        assert!(!pareto_dominates(&exact, &dominator).unwrap());
        let h = rat(1, 8 * n as i64);
        let short = sharing_matrix(&cake_division(n, rat(1, n as i64) - h).into(), &ms).unwrap();
        assert!(!is_k_proportional(&short, n - 1).unwrap().holds);
    }
}

#[test]
fn cake_certificate_n5() {
    let c = certify_cake_pareto(5, 40).unwrap();
    let Evidence::Cake(e) = &c.evidence else { panic!("cake evidence") };
    assert!(e.proportional_found >= 1);
    assert_eq!((e.diagonal_failures, e.undominated), (0, 0));
    assert!(c.passed);
}

#[test]
fn pie_search_is_thread_independent() {
    let base = PieSearch { n: 5, k: 4, grid: 24, refine_rounds: 2, threads: 1 };
    let one = certify_pie_impossibility(&base).unwrap();
    let four = certify_pie_impossibility(&PieSearch { threads: 4, ..base }).unwrap();
    assert_eq!(one.evidence, four.evidence);
    assert_eq!(one.divisions_examined, four.divisions_examined);
    let Evidence::Pie(e) = &one.evidence else { panic!("pie evidence") };
    assert!(e.v_star > POSITIVITY_BAR);
    assert!(e.v_star <= e.refined_v && e.refined_v <= e.grid_v);
}

#[test]
fn pie_sanity_inversion_small() {
    let c = certify_pie_impossibility(&PieSearch { n: 5, k: 5, grid: 30, refine_rounds: 1, threads: 1 }).unwrap();
    let Evidence::Pie(e) = &c.evidence else { panic!("pie evidence") };
    assert!(e.v_star <= POSITIVITY_BAR);
    assert!(c.passed);
}
