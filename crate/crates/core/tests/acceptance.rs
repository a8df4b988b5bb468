//! Acceptance suite. Runs as a plain binary and prints one line per criterion.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use kapproval::dominance::{plurality, two_approval};
use kapproval::election::{all_classes, canonical_ballot, Ballot, CandidateId, TieBreakOrder};
use kapproval::manipulation::{self, ManipulationKind};
use kapproval::x3c::{self, X3CInstance};
use kapproval::{fixtures, BallotClass, Election, GsGame, Oracle, OracleBudget, StrategyPolicy};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, what: impl Into<String>) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn err(e: kapproval::Error) -> String {
    e.to_string()
}

fn class(e: &Election, members: &str) -> BallotClass {
    BallotClass::new(members.split_whitespace().map(|n| e.candidate(n).expect("name")))
}

fn classes_named(e: &Election, set: &BTreeSet<BallotClass>) -> Vec<String> {
    set.iter().map(|c| e.format_class(c)).collect()
}

fn two_manipulator_risk() -> Check {
    let e = fixtures::two_manipulator_risk();
    let scores: Vec<usize> = ["c", "b", "a"].iter().map(|n| e.score(e.candidate(n).unwrap())).collect();
    ensure(e.name(e.winner()) == "c" && scores == [4, 3, 1], format!("winner/scores {scores:?}"))?;
    let n: Vec<usize> = manipulation::gs_manipulators(&e).into_iter().collect();
    ensure(n == [0, 1], format!("manipulators {n:?}"))?;
    let g = GsGame::build(e.clone(), 0, StrategyPolicy::AllLevel1).map_err(err)?;
    let bac = e.parse_ballot("b a c").unwrap();
    let sincere = e.ballot(0).clone();
    let oracle = Oracle::new(&g, OracleBudget::default()).map_err(err)?;
    let flow = two_approval::analyzer(&g).map_err(err)?;
    for (label, wd) in [
        ("oracle bac>bca", oracle.weakly_dominates(&bac, &sincere)),
        ("oracle bca>bac", oracle.weakly_dominates(&sincere, &bac)),
        ("flow bac>bca", flow.weakly_dominates(&bac, &sincere)),
        ("flow bca>bac", flow.weakly_dominates(&sincere, &bac)),
    ] {
        ensure(!wd.map_err(err)?, format!("{label} dominates"))?;
    }
    let both = g.counterprofiles(10).map_err(err)?.last().unwrap();
    let out = g.outcome(&bac, &both).map_err(err)?;
    ensure(e.name(out) == "a", format!("outcome(bac, bac) = {}", e.name(out)))?;
    Ok("winner c (4,3,1), manipulators {1,2}, mutual non-dominance, outcome a".into())
}

fn three_level2() -> Check {
    let e = fixtures::three_level2_plurality();
    let g = GsGame::build(e.clone(), 0, StrategyPolicy::AllLevel1).map_err(err)?;
    let expected: BTreeSet<BallotClass> = ["a", "b", "c"].iter().map(|n| class(&e, n)).collect();
    let flow = plurality::enumerate_level2(&g).map_err(err)?;
    let oracle = Oracle::new(&g, OracleBudget::default()).map_err(err)?.enumerate_level2().map_err(err)?;
    ensure(flow == expected, format!("flow {:?}", classes_named(&e, &flow)))?;
    ensure(oracle == expected, format!("oracle {:?}", classes_named(&e, &oracle)))?;
    Ok(format!("level-2 = {:?} (flow and oracle)", classes_named(&e, &flow)))
}

fn incomparable_improving() -> Check {
    let e = fixtures::incomparable_improving();
    let g = GsGame::build(e.clone(), 0, StrategyPolicy::AllLevel1).map_err(err)?;
    let badwc = e.parse_ballot("b a d w c").unwrap();
    let dabwc = e.parse_ballot("d a b w c").unwrap();
    let oracle = Oracle::new(&g, OracleBudget::default()).map_err(err)?;
    let flow = plurality::analyzer(&g).map_err(err)?;
    for b in [&badwc, &dabwc] {
        ensure(oracle.is_improving(b).map_err(err)?, "oracle: not improving")?;
        ensure(flow.is_improving(b).map_err(err)?, "flow: not improving")?;
    }
    ensure(!oracle.weakly_dominates(&badwc, &dabwc).map_err(err)?, "badwc dominates dabwc")?;
    ensure(!oracle.weakly_dominates(&dabwc, &badwc).map_err(err)?, "dabwc dominates badwc")?;
    Ok("badwc, dabwc improving and incomparable".into())
}

fn counter_manipulation() -> Check {
    let e = fixtures::counter_manipulation();
    let g = GsGame::build(e.clone(), 0, StrategyPolicy::AllLevel1).map_err(err)?;
    let acb = e.parse_ballot("a c b").unwrap();
    let cab = e.ballot(0).clone();
    let oracle = Oracle::new(&g, OracleBudget::default()).map_err(err)?;
    let flow = plurality::analyzer(&g).map_err(err)?;
    ensure(flow.weakly_dominates(&acb, &cab).map_err(err)?, "flow: acb does not dominate cab")?;
    ensure(oracle.weakly_dominates(&acb, &cab).map_err(err)?, "oracle: acb does not dominate cab")?;
    ensure(!flow.is_level2(&cab).map_err(err)? && !oracle.is_level2(&cab).map_err(err)?, "cab is level-2")?;
    ensure(flow.is_level2(&acb).map_err(err)? && oracle.is_level2(&acb).map_err(err)?, "acb not level-2")?;
    ensure(flow.is_improving(&acb).map_err(err)? && oracle.is_improving(&acb).map_err(err)?, "acb not improving")?;
    Ok("acb dominates cab; acb level-2 and improving; cab not level-2".into())
}

fn dominant_double_swap() -> Check {
    let e = fixtures::dominant_double_swap();
    let sets = fixtures::dominant_double_swap_strategies().into_iter().collect();
    let g = GsGame::build(e.clone(), 0, StrategyPolicy::Explicit(sets)).map_err(err)?;
    ensure(g.counterprofile_count() == 4, "expected 4 counter-profiles")?;
    let oracle = Oracle::new(&g, OracleBudget::default()).map_err(err)?;
    let bc = class(&e, "b c");
    let mut dominated = 0;
    for u in all_classes(e.candidate_count(), 2) {
        if u != bc {
            ensure(
                oracle.weakly_dominates_class(&bc, &u).map_err(err)?,
                format!("{{b,c}} does not dominate {}", e.format_class(&u)),
            )?;
            dominated += 1;
        }
    }
    let l2 = oracle.enumerate_level2().map_err(err)?;
    ensure(l2 == BTreeSet::from([bc.clone()]), format!("level-2 {:?}", classes_named(&e, &l2)))?;
    let flow = two_approval::enumerate_level2_2(&g).map_err(err)?;
    ensure(flow == l2, "flow level-2 differs")?;
    Ok(format!("top:{{b,c}} dominates all {dominated} other classes; unique level-2"))
}

fn plurality_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut games, mut queries, mut bad) = (0, 0, 0);
    for round in 0..200 {
        let m = 2 + round % 3;
        let n = 1 + rng.gen_range(0..6);
        let g = random_game(&mut rng, m, n, 1, &StrategyPolicy::AllLevel1, 1, 20);
        let g = if rng.gen_bool(0.5) { thin_strategy_sets(&mut rng, &g) } else { g };
        ensure(g.strategy_sets().iter().all(|s| s.len() <= 2), "strategy set larger than 2")?;
        let (q, b) = compare_with_oracle(&g);
        games += 1;
        queries += q;
        bad += b;
    }
    ensure(bad == 0, format!("{bad} of {queries} queries disagree"))?;
    Ok(format!("{games} games, {queries} class pairs, 0 disagreements"))
}

fn two_approval_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut games, mut queries, mut bad) = (0, 0, 0);
    for round in 0..200 {
        let m = 3 + round % 3;
        let n = 2 + rng.gen_range(0..6);
        let g = random_game(&mut rng, m, n, 2, &StrategyPolicy::Minimal, 2, 20);
        let g = if rng.gen_bool(0.3) { thin_strategy_sets(&mut rng, &g) } else { g };
        two_approval::validate_minimal(&g).map_err(err)?;
        let (q, b) = compare_with_oracle(&g);
        games += 1;
        queries += q;
        bad += b;
    }
    ensure(bad == 0, format!("{bad} of {queries} queries disagree"))?;
    Ok(format!("{games} games, {queries} class pairs, 0 disagreements"))
}

fn structural_invariants() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut manipulations = 0usize;
    let elections = 1200;
    for round in 0..elections {
        let k = 1 + round % 4;
        let m = rng.gen_range(k + 1..=6);
        let n = rng.gen_range(1..=8);
        let e = random_election(&mut rng, m, n, k);
        let w = e.winner();
        let s = manipulation::competitive_sets(&e).union();
        for i in 0..n {
            let sincere = e.ballot(i);
            let a = e.class_of(sincere);
            for t in all_classes(m, k) {
                let alt = canonical_ballot(&t, sincere);
                let x = e.with_ballot(i, alt.clone()).winner();
                if !sincere.prefers(x, w) {
                    continue;
                }
                manipulations += 1;
                ensure(s.contains(&x), format!("round {round}: target outside S"))?;
                let promoter = !a.contains(w) && !a.contains(x);
                let demoter = a.contains(w) && a.contains(x);
                ensure(promoter != demoter, format!("round {round}: classification not exclusive"))?;
                let kind = manipulation::classify(&e, i, &alt).map_err(err)?;
                ensure((kind == ManipulationKind::Promoter) == promoter, "classify disagrees")?;
            }
            if !manipulation::is_manipulator(&e, i).map_err(err)? {
                continue;
            }
            let minimal = manipulation::minimal_level1_strategies(&e, i).map_err(err)?;
            ensure(!minimal.is_empty() || k > 2, format!("round {round}: no minimal level-1 strategy"))?;
            if k == 2 {
                check_two_approval_structure(&e, i, &minimal).map_err(|m| format!("round {round}: {m}"))?;
            }
        }
    }
    Ok(format!("{elections} elections, {manipulations} manipulations, 0 violations"))
}

fn check_two_approval_structure(e: &Election, i: usize, minimal: &BTreeSet<BallotClass>) -> std::result::Result<(), String> {
    let sincere = e.ballot(i);
    let a = e.class_of(sincere);
    let w = e.winner();
    match manipulation::manipulator_kind(e, i) {
        ManipulationKind::Demoter => {
            let p_star = manipulation::p_star(e).ok_or("demoter without p*")?;
            ensure(sincere.top() == p_star, "demoter's top is not p*")?;
            ensure(
                minimal.iter().all(|t| t.contains(p_star) && !t.contains(w)),
                "demoter strategy is not {p*, c}",
            )
        }
        ManipulationKind::Promoter => {
            let s = manipulation::competitive_sets(e).union();
            let p = *s
                .iter()
                .filter(|c| !a.contains(**c))
                .min_by_key(|c| sincere.position(**c))
                .ok_or("promoter without a target")?;
            let expected: BTreeSet<BallotClass> = a
                .iter()
                .map(|keep| BallotClass::new([keep, p]))
                .collect();
            ensure(minimal == &expected, "promoter strategies are not {a,p}, {a',p}")
        }
    }
}

fn x3c_instances() -> Vec<X3CInstance> {
    let one = |j: usize| X3CInstance::new(3, vec![[0, 1, 2]; j]).unwrap();
    let mut out: Vec<X3CInstance> = (0..10).map(one).collect();
    for sets in [vec![], vec![[0, 1, 2], [2, 3, 4]], vec![[0, 1, 3], [2, 4, 5]]] {
        out.push(X3CInstance::new(6, sets).unwrap());
    }
    out
}

fn x3c_correspondence() -> Check {
    let (mut yes, mut no) = (0, 0);
    for (idx, raw) in x3c_instances().iter().enumerate() {
        for k in if idx == 1 { vec![4, 5] } else { vec![4] } {
            let out = x3c::generate(raw, k).map_err(err)?;
            let solvable = x3c::solve_x3c(&out.instance).map_err(err)?;
            let oracle = Oracle::new(&out.game, OracleBudget::default()).map_err(err)?;
            let dominates = oracle.weakly_dominates(&out.z0_prime, &out.z0).map_err(err)?
                && oracle.weakly_dominates(&out.z0_prime, &out.z0_dprime).map_err(err)?;
            ensure(
                dominates != solvable,
                format!("instance {idx}, k = {k}: dominance {dominates}, cover {solvable}"),
            )?;
            if let Some(cover) = x3c::find_exact_cover(&out.instance, 200).map_err(err)? {
                let cp = out.profile_for_sets(&cover);
                let sincere = out.game.outcome(&out.z0, &cp).map_err(err)?;
                let prime = out.game.outcome(&out.z0_prime, &cp).map_err(err)?;
                ensure(sincere == out.roles.element[0] && prime == out.roles.c, "cover witness mismatch")?;
            }
            if solvable {
                yes += 1;
            } else {
                no += 1;
            }
        }
    }
    Ok(format!("{} games ({yes} yes, {no} no), all match", yes + no))
}

fn balanced(n: usize, m: usize, k: usize, seed: u64) -> Election {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profile: Vec<Ballot> = (0..n)
        .map(|v| {
            let mut ranking: Vec<usize> = (0..k).map(|j| (v * k + j) % m).collect();
            ranking.shuffle(&mut rng);
            let mut rest: Vec<usize> = (0..m).filter(|c| !ranking.contains(c)).collect();
            rest.shuffle(&mut rng);
            ranking.extend(rest);
            Ballot::from_indices(&ranking, m).unwrap()
        })
        .collect();
    let mut tb: Vec<CandidateId> = (0..m).map(CandidateId).collect();
    tb.shuffle(&mut rng);
    let names = (0..m).map(|i| format!("c{i}")).collect();
    Election::new(names, k, TieBreakOrder::new(tb, m).unwrap(), profile).unwrap()
}

fn performance() -> Check {
    let start = Instant::now();
    let g = GsGame::build(balanced(200, 20, 1, 1), 0, StrategyPolicy::AllLevel1).map_err(err)?;
    let l2 = plurality::enumerate_level2(&g).map_err(err)?;
    let plurality_time = start.elapsed();
    ensure(plurality_time < Duration::from_secs(5), format!("plurality took {plurality_time:?}"))?;
    let opp1 = g.opponents().len();

    let start = Instant::now();
    let g2 = GsGame::build(balanced(100, 12, 2, 2), 0, StrategyPolicy::Minimal).map_err(err)?;
    let l2b = two_approval::enumerate_level2_2(&g2).map_err(err)?;
    let approval_time = start.elapsed();
    ensure(approval_time < Duration::from_secs(30), format!("2-approval took {approval_time:?}"))?;
    ensure(!l2.is_empty() && !l2b.is_empty(), "empty level-2 set")?;
    Ok(format!(
        "n=200 m=20 k=1 ({opp1} manipulators) {plurality_time:.2?}; n=100 m=12 k=2 ({} manipulators) {approval_time:.2?}",
        g2.opponents().len()
    ))
}

type Criterion = (&'static str, Duration, fn() -> Check);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("two manipulators, 2-approval", Duration::from_secs(1), two_manipulator_risk),
        ("three level-2 classes, plurality", Duration::from_secs(1), three_level2),
        ("incomparable improving strategies", Duration::from_secs(1), incomparable_improving),
        ("counter-manipulation, plurality", Duration::from_secs(1), counter_manipulation),
        ("dominant double swap, 2-approval", Duration::from_secs(10), dominant_double_swap),
        ("flow = oracle, plurality", Duration::from_secs(60), plurality_equivalence),
        ("flow = oracle, minimal 2-approval", Duration::from_secs(120), two_approval_equivalence),
        ("structural invariants", Duration::from_secs(600), structural_invariants),
        ("exact-cover correspondence", Duration::from_secs(300), x3c_correspondence),
        ("polynomial engine performance", Duration::from_secs(35), performance),
    ];
    let mut failed = 0;
    for (i, (name, limit, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let verdict = match result {
            Ok(detail) if elapsed <= limit => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; exceeded {limit:?}")),
            Err(why) => ("FAIL", why),
        };
        if verdict.0 == "FAIL" {
            failed += 1;
        }
        println!("{} criterion {:>2} {name}: {} [{elapsed:.2?}]", verdict.0, i + 1, verdict.1);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
