#![allow(dead_code)]

use kapproval::election::{all_classes, Ballot, CandidateId, TieBreakOrder};
use kapproval::{Election, FlowDominance, GsGame, Oracle, OracleBudget, StrategyPolicy};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeMap;

pub fn random_ballot<R: Rng>(rng: &mut R, m: usize) -> Ballot {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    Ballot::from_indices(&order, m).unwrap()
}

pub fn random_election<R: Rng>(rng: &mut R, m: usize, n: usize, k: usize) -> Election {
    let names = (0..m).map(|i| format!("c{i}")).collect();
    let mut tb: Vec<CandidateId> = (0..m).map(CandidateId).collect();
    tb.shuffle(rng);
    let profile = (0..n).map(|_| random_ballot(rng, m)).collect();
    Election::new(names, k, TieBreakOrder::new(tb, m).unwrap(), profile).unwrap()
}

/// A random election whose game has at least `min_opponents` non-focal players,
/// if one turns up within `tries` samples.
pub fn random_game<R: Rng>(
    rng: &mut R,
    m: usize,
    n: usize,
    k: usize,
    policy: &StrategyPolicy,
    min_opponents: usize,
    tries: usize,
) -> GsGame {
    let mut last = None;
    for _ in 0..tries {
        let e = random_election(rng, m, n, k);
        let focal = rng.gen_range(0..n);
        let g = GsGame::build(e, focal, policy.clone()).unwrap();
        if g.opponents().len() >= min_opponents {
            return g;
        }
        last = Some(g);
    }
    last.unwrap()
}

/// Replaces each opponent's set by a random subset that keeps the sincere ballot.
pub fn thin_strategy_sets<R: Rng>(rng: &mut R, game: &GsGame) -> GsGame {
    let sets: BTreeMap<usize, Vec<Ballot>> = game
        .opponents()
        .iter()
        .zip(game.strategy_sets())
        .map(|(&i, set)| {
            let kept = set.iter().skip(1).filter(|_| rng.gen_bool(0.6)).cloned().collect();
            (i, kept)
        })
        .collect();
    GsGame::build(game.election().clone(), game.focal(), StrategyPolicy::Explicit(sets)).unwrap()
}

/// `(queries, disagreements)` between the flow engine and the oracle on all
/// ordered pairs of distinct classes.
pub fn compare_with_oracle(game: &GsGame) -> (usize, usize) {
    let flow = FlowDominance::new(game).unwrap();
    let oracle = Oracle::new(game, OracleBudget::default()).unwrap();
    let e = game.election();
    let classes: Vec<_> = all_classes(e.candidate_count(), e.k()).collect();
    let mut queries = 0;
    let mut bad = 0;
    for u in &classes {
        for v in &classes {
            if u == v {
                continue;
            }
            queries += 1;
            let sb_flow = flow.exists_strictly_better_class(u, v).unwrap();
            let sb_oracle = oracle.exists_strictly_better_class(u, v).unwrap();
            let wd_flow = flow.weakly_dominates_class(u, v).unwrap();
            let wd_oracle = oracle.weakly_dominates_class(u, v).unwrap();
            if sb_flow != sb_oracle || wd_flow != wd_oracle {
                bad += 1;
            }
        }
    }
    (queries, bad)
}

pub fn arb_election(m: std::ops::RangeInclusive<usize>, n: std::ops::RangeInclusive<usize>, k_max: usize) -> impl Strategy<Value = Election> {
    (m, n).prop_flat_map(move |(m, n)| {
        let perm = Just((0..m).collect::<Vec<usize>>()).prop_shuffle();
        (
            1..=k_max.min(m - 1),
            perm.clone(),
            proptest::collection::vec(perm, n),
        )
            .prop_map(move |(k, tb, ballots)| {
                let names = (0..m).map(|i| format!("c{i}")).collect();
                let tb = TieBreakOrder::new(tb.into_iter().map(CandidateId).collect(), m).unwrap();
                let profile = ballots
                    .iter()
                    .map(|b| Ballot::from_indices(b, m).unwrap())
                    .collect();
                Election::new(names, k, tb, profile).unwrap()
            })
    })
}
