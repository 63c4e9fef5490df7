mod common;

use common::*;
use fairdiv_core::fairness::*;
use fairdiv_core::fixtures;
use fairdiv_core::rational::{int, rat};
use fairdiv_core::SharingMatrix;
use num_traits::Signed;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn fast_path_matches_subset_enumeration(m in matrix_strategy(2..=7)) {
        for k in 2..=m.n() {
            let w = worst_k_witness(&m, k).unwrap();
            prop_assert_eq!(&w.slack, &brute_subset_slack(&m, k));
            prop_assert_eq!(is_k_proportional(&m, k).unwrap().holds, !w.slack.is_negative());
            prop_assert_eq!(is_strong_k_proportional(&m, k).unwrap().holds, w.slack.is_positive());
            // the witness re-verifies
            prop_assert!(w.subset.contains(&w.player) && w.subset.len() == k);
            prop_assert_eq!(subset_slack(&m, w.player, &w.subset), w.slack);
        }
    }

    #[test]
    fn prime_form_is_equivalent(m in matrix_strategy(2..=7)) {
        for k in 2..=m.n() {
            prop_assert_eq!(is_k_proportional(&m, k).unwrap().holds, brute_prime_form(&m, k, false));
            prop_assert_eq!(is_strong_k_proportional(&m, k).unwrap().holds, brute_prime_form(&m, k, true));
        }
    }

    #[test]
    fn scale_is_monotone(m in matrix_strategy(2..=8)) {
        for k in 2..m.n() {
            if is_k_proportional(&m, k).unwrap().holds {
                prop_assert!(is_k_proportional(&m, k + 1).unwrap().holds);
            }
            if is_strong_k_proportional(&m, k).unwrap().holds {
                prop_assert!(is_strong_k_proportional(&m, k + 1).unwrap().holds);
            }
        }
    }

    #[test]
    fn endpoints_and_classics(m in matrix_strategy(2..=8)) {
        let n = m.n();
        prop_assert_eq!(is_k_proportional(&m, n).unwrap().holds, is_proportional(&m).holds);
        prop_assert_eq!(is_k_proportional(&m, 2).unwrap().holds, is_envy_free(&m).holds);
        prop_assert_eq!(is_strong_k_proportional(&m, n).unwrap().holds, is_strong_proportional(&m).holds);
        prop_assert_eq!(is_strong_k_proportional(&m, 2).unwrap().holds, is_strong_envy_free(&m).holds);
        if is_envy_free(&m).holds {
            prop_assert!(is_proportional(&m).holds);
        }
        prop_assert_eq!(is_chb(&m, 1).unwrap().holds, is_proportional(&m).holds);
        prop_assert_eq!(is_clb(&m, 1).unwrap().holds, is_proportional(&m).holds);
    }

    #[test]
    fn complement_bounds_match_enumeration(m in matrix_strategy(2..=6)) {
        let n = m.n();
        for k in 1..=n {
            let harmonic = |s: usize| rat((n - s) as i64, (n - s + 1) as i64);
            let linear = |s: usize| rat((n - s) as i64, n as i64);
            prop_assert_eq!(is_chb(&m, k).unwrap().holds, brute_complement(&m, k, harmonic));
            prop_assert_eq!(is_clb(&m, k).unwrap().holds, brute_complement(&m, k, linear));
        }
    }

    #[test]
    fn pareto_is_antisymmetric((a, b) in (2usize..=5).prop_flat_map(|n| (matrix_strategy(n..=n), matrix_strategy(n..=n)))) {
        prop_assert!(!pareto_dominates(&a, &a).unwrap());
        prop_assert!(!(pareto_dominates(&a, &b).unwrap() && pareto_dominates(&b, &a).unwrap()));
    }
}

#[test]
fn example_matrix_profile() {
    let m = SharingMatrix::new(fixtures::four_player_matrix()).unwrap();
    assert!(is_k_proportional(&m, 4).unwrap().holds);
    assert!(is_k_proportional(&m, 3).unwrap().holds);
    let v = is_k_proportional(&m, 2).unwrap();
    assert!(!v.holds);
    let w = v.witness.unwrap();
    assert_eq!((w.player, w.subset.clone()), (0, vec![0, 3]));
    assert!(is_proportional(&m).holds);
    assert!(!is_envy_free(&m).holds);
    assert!(!is_equitable(&m).holds);
}

#[test]
fn exact_matrix_is_non_strict_everywhere() {
    let m = SharingMatrix::exact(5);
    let r = FairnessReport::new(&m);
    assert!(r.proportional.holds && r.envy_free.holds && r.equitable.holds && r.exact.holds);
    assert!(!r.strong_proportional.holds && !r.strong_envy_free.holds);
    for level in &r.k_profile {
        assert!(level.proportional.holds && !level.strong.holds);
    }
    assert!(r.chb.iter().chain(&r.clb).all(|(_, v)| v.holds));
}

#[test]
fn proportional_witness_slack() {
    let m = SharingMatrix::new(vec![
        vec![rat(1, 5), rat(4, 15), rat(4, 15), rat(4, 15)],
        vec![int(0), int(1), int(0), int(0)],
        vec![int(0), int(0), int(1), int(0)],
        vec![int(0), int(0), int(0), int(1)],
    ])
    .unwrap();
    let v = is_proportional(&m);
    assert!(!v.holds);
    let w = v.witness.unwrap();
    assert_eq!((w.player, w.slack), (0, rat(-1, 20)));
}
