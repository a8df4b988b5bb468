mod common;

use std::collections::BTreeSet;

use common::*;
use kapproval::dominance::{plurality, two_approval};
use kapproval::election::all_classes;
use kapproval::{FlowDominance, GsGame, Oracle, OracleBudget, StrategyPolicy};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn check_order(game: &GsGame, wd: impl Fn(&kapproval::BallotClass, &kapproval::BallotClass) -> bool) -> Result<(), TestCaseError> {
    let e = game.election();
    let classes: Vec<_> = all_classes(e.candidate_count(), e.k()).collect();
    let rel: Vec<Vec<bool>> = classes.iter().map(|u| classes.iter().map(|v| wd(u, v)).collect()).collect();
    let n = classes.len();
    for a in 0..n {
        prop_assert!(!rel[a][a]);
        for b in 0..n {
            prop_assert!(!(rel[a][b] && rel[b][a]));
            for c in 0..n {
                if rel[a][b] && rel[b][c] {
                    prop_assert!(rel[a][c]);
                }
            }
        }
    }
    Ok(())
}

fn check_level2_sets(d: &FlowDominance<'_>) -> Result<(), TestCaseError> {
    let l2 = d.enumerate_level2().unwrap();
    let imp = d.enumerate_improving().unwrap();
    prop_assert!(!l2.is_empty());
    let sincere = d.game().sincere_class();
    prop_assert_eq!(imp.is_empty(), l2.contains(&sincere));
    if !imp.is_empty() {
        prop_assert!(!imp.is_disjoint(&l2));
    }
    let oracle = Oracle::new(d.game(), OracleBudget::default()).unwrap();
    prop_assert_eq!(&oracle.enumerate_level2().unwrap(), &l2);
    prop_assert_eq!(&oracle.enumerate_improving().unwrap(), &imp);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn plurality_dominance_is_a_strict_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_game(&mut rng, 4, 6, 1, &StrategyPolicy::AllLevel1, 1, 20);
        let d = plurality::analyzer(&g).unwrap();
        check_order(&g, |u, v| d.weakly_dominates_class(u, v).unwrap())?;
        check_level2_sets(&d)?;
    }

    #[test]
    fn two_approval_dominance_is_a_strict_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_game(&mut rng, 5, 7, 2, &StrategyPolicy::Minimal, 2, 20);
        let d = two_approval::analyzer(&g).unwrap();
        check_order(&g, |u, v| d.weakly_dominates_class(u, v).unwrap())?;
        check_level2_sets(&d)?;
    }

    #[test]
    fn oracle_order_for_any_k(seed in any::<u64>(), k in 2usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_game(&mut rng, k + 2, 6, k, &StrategyPolicy::AllLevel1, 1, 20);
        let o = Oracle::new(&g, OracleBudget::default()).unwrap();
        check_order(&g, |u, v| o.weakly_dominates_class(u, v).unwrap())?;
        prop_assert!(!o.enumerate_level2().unwrap().is_empty());
    }

    #[test]
    fn demoters_keep_p_star(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_game(&mut rng, 5, 7, 2, &StrategyPolicy::Minimal, 2, 20);
        let e = g.election();
        let w = e.winner();
        for (&i, classes) in g.opponents().iter().zip(g.strategy_classes()) {
            if classes[0].contains(w) {
                let top = e.ballot(i).top();
                prop_assert_eq!(Some(top), kapproval::manipulation::p_star(e));
                prop_assert!(classes.iter().all(|c| c.contains(top)));
            }
        }
    }
}

#[test]
fn minimality_validation_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (mut accepted, mut rejected) = (0, 0);
    for _ in 0..200 {
        let g = random_game(&mut rng, 5, 7, 2, &StrategyPolicy::AllLevel1, 1, 20);
        let e = g.election();
        let has_non_minimal = g.opponents().iter().zip(g.strategy_classes()).any(|(&i, classes)| {
            let min = kapproval::manipulation::minimal_swap_count(e, i).unwrap().unwrap();
            classes[1..]
                .iter()
                .any(|c| kapproval::manipulation::swap_count(e, i, c) != min)
        });
        let verdict = two_approval::validate_minimal(&g);
        assert_eq!(verdict.is_err(), has_non_minimal);
        if has_non_minimal {
            rejected += 1;
        } else {
            accepted += 1;
            let thinned = thin_strategy_sets(&mut rng, &g);
            assert!(two_approval::validate_minimal(&thinned).is_ok());
        }
    }
    assert!(accepted > 0 && rejected > 0);
}

#[test]
fn flow_engine_refuses_unrepresentable_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut refused = 0;
    for _ in 0..200 {
        let g = random_game(&mut rng, 6, 7, 3, &StrategyPolicy::AllLevel1, 1, 20);
        let sets: BTreeSet<usize> = g.strategy_sets().iter().map(|s| s.len()).collect();
        if FlowDominance::new(&g).is_err() {
            refused += 1;
            assert!(sets.iter().any(|&n| n > 1));
        }
    }
    assert!(refused > 0);
}
