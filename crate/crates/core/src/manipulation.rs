//! Level-1 analysis: which voters can manipulate, in favour of whom, and with
//! which ballot classes.
//!
//! Everything here reasons about a single voter `i` deviating while the rest
//! of the profile stays sincere. Let `s` be the scores of `V_{-i}`. A class
//! `T` makes `x` win iff `x` beats every `q` at `s + 1_T`. Splitting on
//! whether `x ∈ T`:
//!
//! * with `x`: every `q` must lose to `x` at `(s(x)+1, s(q))`, and the other
//!   `k-1` members of `T` must lose to `x` even after their own boost;
//! * without `x`: every `q` must lose at `(s(x), s(q))`, and all `k` members
//!   of `T` must lose after their boost.
//!
//! This closed form gives feasible sets, level-1 classes and swap distances
//! without looking at all `C(m, k)` classes.

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::election::{Ballot, BallotClass, CandidateId, Election};
use crate::error::{Error, Result};

/// The two ways a single voter can change the k-approval winner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ManipulationKind {
    /// Gives the new winner a point; neither old nor new winner was approved.
    Promoter,
    /// Takes a point from the old winner; both were approved.
    Demoter,
}

/// Candidates that a single point can turn into the winner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompetitiveSets {
    pub winner: CandidateId,
    /// Score `t` of the current winner.
    pub winner_score: usize,
    /// Score `t`, behind the winner in the tie-break order.
    pub s1: BTreeSet<CandidateId>,
    /// Score `t - 1`, ahead of the winner in the tie-break order.
    pub s2: BTreeSet<CandidateId>,
}

impl CompetitiveSets {
    pub fn contains(&self, c: CandidateId) -> bool {
        self.s1.contains(&c) || self.s2.contains(&c)
    }

    pub fn is_empty(&self) -> bool {
        self.s1.is_empty() && self.s2.is_empty()
    }

    pub fn union(&self) -> BTreeSet<CandidateId> {
        self.s1.union(&self.s2).copied().collect()
    }
}

/// Everything a level-1 voter needs to know about its own options.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level1Report {
    pub voter: usize,
    pub manipulator: bool,
    pub feasible: BTreeSet<CandidateId>,
    pub best_feasible: CandidateId,
    pub strategies: BTreeSet<BallotClass>,
    pub minimal_strategies: BTreeSet<BallotClass>,
}

/// The classes that make one target win for one deviating voter.
#[derive(Debug, Clone)]
struct WinningClasses {
    target: CandidateId,
    /// Candidates that stay beaten by `target` when both are boosted.
    with_target: Option<Vec<CandidateId>>,
    /// Candidates that stay beaten by an unboosted `target` when boosted themselves.
    without_target: Option<Vec<CandidateId>>,
}

impl WinningClasses {
    fn compute(election: &Election, base: &[usize], target: CandidateId) -> Self {
        let k = election.k();
        let st = base[target.0];
        let mut with_ok = true;
        let mut without_ok = true;
        let mut boost_with = Vec::new();
        let mut boost_without = Vec::new();
        for q in election.candidates().filter(|&q| q != target) {
            let sq = base[q.0];
            if !election.beats_at(target, st + 1, q, sq) {
                with_ok = false;
            } else if election.beats_at(target, st + 1, q, sq + 1) {
                boost_with.push(q);
            }
            if !election.beats_at(target, st, q, sq) {
                without_ok = false;
            } else if election.beats_at(target, st, q, sq + 1) {
                boost_without.push(q);
            }
        }
        WinningClasses {
            target,
            with_target: (with_ok && boost_with.len() + 1 >= k).then_some(boost_with),
            without_target: (without_ok && boost_without.len() >= k).then_some(boost_without),
        }
    }

    fn feasible(&self) -> bool {
        // a class without the target can always trade a member for the target
        self.with_target.is_some()
    }

    fn contains(&self, class: &BallotClass) -> bool {
        let within = |pool: &[CandidateId], skip: Option<CandidateId>| {
            class
                .iter()
                .filter(|c| Some(*c) != skip)
                .all(|c| pool.contains(&c))
        };
        if class.contains(self.target) {
            self.with_target
                .as_deref()
                .is_some_and(|pool| within(pool, Some(self.target)))
        } else {
            self.without_target
                .as_deref()
                .is_some_and(|pool| within(pool, None))
        }
    }

    /// Fewest candidates of `sincere` that a winning class must drop.
    fn min_swaps(&self, sincere: &BallotClass, k: usize) -> Option<usize> {
        let overlap = |pool: &[CandidateId]| pool.iter().filter(|c| sincere.contains(**c)).count();
        let with = self.with_target.as_deref().map(|pool| {
            let kept = usize::from(sincere.contains(self.target)) + overlap(pool).min(k - 1);
            k - kept
        });
        let without = self
            .without_target
            .as_deref()
            .map(|pool| k - overlap(pool).min(k));
        with.into_iter().chain(without).min()
    }

    /// Winning classes that keep exactly `kept` members of `sincere`.
    fn classes_keeping(&self, sincere: &BallotClass, k: usize, kept: Option<usize>) -> BTreeSet<BallotClass> {
        let mut out = BTreeSet::new();
        let target_in_sincere = usize::from(sincere.contains(self.target));
        if let Some(pool) = &self.with_target {
            let need = kept.map(|kept| kept.checked_sub(target_in_sincere));
            if need != Some(None) {
                extend_with_choices(&mut out, pool, sincere, k - 1, need.flatten(), Some(self.target));
            }
        }
        if let Some(pool) = &self.without_target {
            extend_with_choices(&mut out, pool, sincere, k, kept, None);
        }
        out
    }
}

/// Adds every `size`-subset of `pool` (plus `extra`) that shares exactly
/// `overlap` members with `sincere`, or all of them when `overlap` is `None`.
fn extend_with_choices(
    out: &mut BTreeSet<BallotClass>,
    pool: &[CandidateId],
    sincere: &BallotClass,
    size: usize,
    overlap: Option<usize>,
    extra: Option<CandidateId>,
) {
    let mut push = |chosen: Vec<CandidateId>| {
        out.insert(BallotClass::new(chosen.into_iter().chain(extra)));
    };
    match overlap {
        None => pool.iter().copied().combinations(size).for_each(&mut push),
        Some(j) => {
            let (inside, outside): (Vec<CandidateId>, Vec<CandidateId>) =
                pool.iter().partition(|c| sincere.contains(**c));
            if j > size || j > inside.len() || size - j > outside.len() {
                return;
            }
            for a in inside.iter().copied().combinations(j) {
                for b in outside.iter().copied().combinations(size - j) {
                    push(a.iter().copied().chain(b).collect());
                }
            }
        }
    }
}

fn check_voter(election: &Election, voter: usize) -> Result<()> {
    if voter >= election.voter_count() {
        return Err(Error::Parameter(format!(
            "voter {voter} out of range (n = {})",
            election.voter_count()
        )));
    }
    Ok(())
}

/// Candidates voter `i` can make the winner by changing only its own ballot.
pub fn feasible_set(election: &Election, voter: usize) -> Result<BTreeSet<CandidateId>> {
    check_voter(election, voter)?;
    let base = election.scores_without(&[voter]);
    Ok(election
        .candidates()
        .filter(|&x| WinningClasses::compute(election, &base, x).feasible())
        .collect())
}

/// Voter `i`'s most preferred feasible candidate.
pub fn best_feasible(election: &Election, voter: usize) -> Result<CandidateId> {
    let feasible = feasible_set(election, voter)?;
    let ballot = election.ballot(voter);
    Ok(*feasible
        .iter()
        .min_by_key(|c| ballot.position(**c))
        .expect("the sincere winner is always feasible"))
}

pub fn is_manipulator(election: &Election, voter: usize) -> Result<bool> {
    let best = best_feasible(election, voter)?;
    Ok(election.ballot(voter).prefers(best, election.winner()))
}

/// `N(V, R_k)`: voters with at least one manipulative ballot.
pub fn gs_manipulators(election: &Election) -> BTreeSet<usize> {
    (0..election.voter_count())
        .filter(|&i| is_manipulator(election, i).expect("voter in range"))
        .collect()
}

pub fn competitive_sets(election: &Election) -> CompetitiveSets {
    let scores = election.scores();
    let winner = election.winner_of(&scores);
    let t = scores[winner.0];
    let tb = election.tiebreak();
    let s1 = election
        .candidates()
        .filter(|&c| c != winner && scores[c.0] == t && tb.precedes(winner, c))
        .collect();
    let s2 = election
        .candidates()
        .filter(|&c| t > 0 && scores[c.0] == t - 1 && tb.precedes(c, winner))
        .collect();
    CompetitiveSets {
        winner,
        winner_score: t,
        s1,
        s2,
    }
}

/// Tie-break-first member of `S_1`, or of `S_2` when `S_1` is empty.
pub fn p_star(election: &Election) -> Option<CandidateId> {
    let sets = competitive_sets(election);
    let tb = election.tiebreak();
    let first = |set: &BTreeSet<CandidateId>| set.iter().copied().min_by_key(|c| tb.rank(*c));
    first(&sets.s1).or_else(|| first(&sets.s2))
}

/// Classifies a manipulative ballot of voter `i` as promotion or demotion.
pub fn classify(election: &Election, voter: usize, alt: &Ballot) -> Result<ManipulationKind> {
    check_voter(election, voter)?;
    let k = election.k();
    let w = election.winner();
    let x = election.with_ballot(voter, alt.clone()).winner();
    let sincere = election.ballot(voter);
    if !sincere.prefers(x, w) {
        return Err(Error::NotManipulative { voter });
    }
    let approved = election.class_of(sincere);
    match (approved.contains(w), approved.contains(x)) {
        (false, false) => Ok(ManipulationKind::Promoter),
        (true, true) => Ok(ManipulationKind::Demoter),
        // x approved with w not: w keeps or gains, x keeps or loses, so w still wins.
        // w approved with x not: contradicts x being preferred to w.
        _ => unreachable!("manipulation towards {x} at k = {k} is neither promotion nor demotion"),
    }
}

/// How a GS-manipulator must manipulate, judged from its sincere ballot alone.
pub fn manipulator_kind(election: &Election, voter: usize) -> ManipulationKind {
    let approved = election.class_of(election.ballot(voter));
    if approved.contains(election.winner()) {
        ManipulationKind::Demoter
    } else {
        ManipulationKind::Promoter
    }
}

/// Number of approved candidates voter `i` drops to submit `class`.
pub fn swap_count(election: &Election, voter: usize, class: &BallotClass) -> usize {
    election.class_of(election.ballot(voter)).difference_len(class)
}

struct Level1View {
    sincere: BallotClass,
    manipulator: bool,
    feasible: BTreeSet<CandidateId>,
    best: WinningClasses,
    min_swaps: usize,
}

impl Level1View {
    fn compute(election: &Election, voter: usize) -> Result<Self> {
        check_voter(election, voter)?;
        let k = election.k();
        let base = election.scores_without(&[voter]);
        let ballot = election.ballot(voter);
        let sincere = election.class_of(ballot);
        let w = election.winner();
        let families: Vec<WinningClasses> = election
            .candidates()
            .map(|x| WinningClasses::compute(election, &base, x))
            .collect();
        let feasible: BTreeSet<CandidateId> = families
            .iter()
            .filter(|f| f.feasible())
            .map(|f| f.target)
            .collect();
        let best = *feasible
            .iter()
            .min_by_key(|c| ballot.position(**c))
            .expect("the sincere winner is always feasible");
        let manipulator = ballot.prefers(best, w);
        let min_swaps = families
            .iter()
            .filter(|f| ballot.prefers(f.target, w))
            .filter_map(|f| f.min_swaps(&sincere, k))
            .min()
            .unwrap_or(0);
        Ok(Level1View {
            sincere,
            manipulator,
            feasible,
            best: families[best.0].clone(),
            min_swaps,
        })
    }
}

/// The level-1 strategies of voter `i`, both all of them and the minimal ones.
pub fn level1_strategies(election: &Election, voter: usize) -> Result<Level1Report> {
    let view = Level1View::compute(election, voter)?;
    let k = election.k();
    let (strategies, minimal_strategies) = if view.manipulator {
        (
            view.best.classes_keeping(&view.sincere, k, None),
            view.best
                .classes_keeping(&view.sincere, k, Some(k - view.min_swaps)),
        )
    } else {
        let only = BTreeSet::from([view.sincere.clone()]);
        (only.clone(), only)
    };
    Ok(Level1Report {
        voter,
        manipulator: view.manipulator,
        feasible: view.feasible,
        best_feasible: view.best.target,
        strategies,
        minimal_strategies,
    })
}

/// Only the minimal level-1 classes; avoids enumerating all level-1 classes.
pub fn minimal_level1_strategies(election: &Election, voter: usize) -> Result<BTreeSet<BallotClass>> {
    let view = Level1View::compute(election, voter)?;
    if !view.manipulator {
        return Ok(BTreeSet::from([view.sincere]));
    }
    let k = election.k();
    Ok(view
        .best
        .classes_keeping(&view.sincere, k, Some(k - view.min_swaps)))
}

/// Whether `class` is a level-1 strategy of a GS-manipulator `i`.
pub fn is_level1_class(election: &Election, voter: usize, class: &BallotClass) -> Result<bool> {
    let view = Level1View::compute(election, voter)?;
    Ok(view.manipulator && view.best.contains(class))
}

/// Whether `class` is a minimal manipulation that is also level-1.
pub fn is_minimal_level1_class(election: &Election, voter: usize, class: &BallotClass) -> Result<bool> {
    let view = Level1View::compute(election, voter)?;
    Ok(view.manipulator
        && view.best.contains(class)
        && view.sincere.difference_len(class) == view.min_swaps)
}

/// Smallest number of swaps over all manipulative ballots of voter `i`
/// (`None` for a voter who cannot manipulate).
pub fn minimal_swap_count(election: &Election, voter: usize) -> Result<Option<usize>> {
    let view = Level1View::compute(election, voter)?;
    Ok(view.manipulator.then_some(view.min_swaps))
}
