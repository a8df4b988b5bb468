//! GS-games: a focal voter facing the GS-manipulators of an election, each
//! restricted to its sincere ballot plus some of its level-1 strategies.

use std::collections::{BTreeMap, BTreeSet};

use crate::election::{canonical_ballot, Ballot, BallotClass, CandidateId, Election};
use crate::error::{Error, Result};
use crate::manipulation;

/// How the strategy sets of the manipulators are chosen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategyPolicy {
    /// Everybody votes sincerely.
    TruthfulOnly,
    /// Sincere ballot plus the minimal level-1 classes.
    Minimal,
    /// Sincere ballot plus every level-1 class.
    AllLevel1,
    /// User-chosen ballots per manipulator; unlisted manipulators stay sincere.
    Explicit(BTreeMap<usize, Vec<Ballot>>),
}

/// One joint choice of the non-focal players, aligned with
/// [`GsGame::opponents`]: `choice[j]` indexes into the strategy set of the
/// `j`-th opponent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CounterProfile {
    pub choice: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct GsGame {
    election: Election,
    focal: usize,
    manipulators: BTreeSet<usize>,
    opponents: Vec<usize>,
    strategy_sets: Vec<Vec<Ballot>>,
    classes: Vec<Vec<BallotClass>>,
    fixed_scores: Vec<usize>,
}

impl GsGame {
    pub fn build(election: Election, focal: usize, policy: StrategyPolicy) -> Result<Self> {
        if focal >= election.voter_count() {
            return Err(Error::Parameter(format!(
                "focal voter {focal} out of range (n = {})",
                election.voter_count()
            )));
        }
        let manipulators = manipulation::gs_manipulators(&election);
        let opponents: Vec<usize> = manipulators.iter().copied().filter(|&i| i != focal).collect();

        if let StrategyPolicy::Explicit(sets) = &policy {
            if let Some(&bad) = sets.keys().find(|i| !opponents.contains(i)) {
                return Err(Error::InvalidStrategy {
                    voter: bad,
                    reason: if bad == focal {
                        "the focal voter has no restricted strategy set".into()
                    } else {
                        "not a GS-manipulator".into()
                    },
                });
            }
        }

        let mut strategy_sets = Vec::with_capacity(opponents.len());
        for &i in &opponents {
            let sincere = election.ballot(i).clone();
            let extra: Vec<Ballot> = match &policy {
                StrategyPolicy::TruthfulOnly => Vec::new(),
                StrategyPolicy::Minimal => manipulation::minimal_level1_strategies(&election, i)?
                    .iter()
                    .map(|c| canonical_ballot(c, &sincere))
                    .collect(),
                StrategyPolicy::AllLevel1 => manipulation::level1_strategies(&election, i)?
                    .strategies
                    .iter()
                    .map(|c| canonical_ballot(c, &sincere))
                    .collect(),
                StrategyPolicy::Explicit(sets) => {
                    let listed = sets.get(&i).cloned().unwrap_or_default();
                    for b in &listed {
                        if b.len() != election.candidate_count() {
                            return Err(Error::InvalidStrategy {
                                voter: i,
                                reason: "ballot does not rank every candidate".into(),
                            });
                        }
                        let class = election.class_of(b);
                        if class != election.class_of(&sincere)
                            && !manipulation::is_level1_class(&election, i, &class)?
                        {
                            return Err(Error::InvalidStrategy {
                                voter: i,
                                reason: format!(
                                    "{} is neither truthful nor a level-1 strategy",
                                    election.format_ballot(b)
                                ),
                            });
                        }
                    }
                    listed
                }
            };
            let mut seen = BTreeSet::new();
            let set: Vec<Ballot> = std::iter::once(sincere)
                .chain(extra)
                .filter(|b| seen.insert(election.class_of(b)))
                .collect();
            strategy_sets.push(set);
        }

        let classes = strategy_sets
            .iter()
            .map(|set| set.iter().map(|b| election.class_of(b)).collect())
            .collect();
        let mut excluded = opponents.clone();
        excluded.push(focal);
        let fixed_scores = election.scores_without(&excluded);
        Ok(GsGame {
            election,
            focal,
            manipulators,
            opponents,
            strategy_sets,
            classes,
            fixed_scores,
        })
    }

    pub fn election(&self) -> &Election {
        &self.election
    }

    pub fn focal(&self) -> usize {
        self.focal
    }

    pub fn focal_ballot(&self) -> &Ballot {
        self.election.ballot(self.focal)
    }

    pub fn sincere_class(&self) -> BallotClass {
        self.election.class_of(self.focal_ballot())
    }

    /// `N(V, R)`, which may include the focal voter.
    pub fn manipulators(&self) -> &BTreeSet<usize> {
        &self.manipulators
    }

    /// `N_1`: the manipulators together with the focal voter.
    pub fn players(&self) -> BTreeSet<usize> {
        self.manipulators.iter().copied().chain([self.focal]).collect()
    }

    /// Non-focal players in increasing voter order.
    pub fn opponents(&self) -> &[usize] {
        &self.opponents
    }

    /// Strategy sets aligned with [`opponents`](Self::opponents); the sincere ballot comes first.
    pub fn strategy_sets(&self) -> &[Vec<Ballot>] {
        &self.strategy_sets
    }

    pub fn strategy_set(&self, voter: usize) -> Option<&[Ballot]> {
        self.opponents
            .iter()
            .position(|&i| i == voter)
            .map(|j| self.strategy_sets[j].as_slice())
    }

    pub fn strategy_classes(&self) -> &[Vec<BallotClass>] {
        &self.classes
    }

    /// Scores contributed by voters outside the game, who always vote sincerely.
    pub fn fixed_scores(&self) -> &[usize] {
        &self.fixed_scores
    }

    /// `Π |A_i|`, saturating.
    pub fn counterprofile_count(&self) -> u128 {
        self.strategy_sets
            .iter()
            .fold(1u128, |acc, s| acc.saturating_mul(s.len() as u128))
    }

    /// Every counter-profile, last opponent varying fastest.
    pub fn counterprofiles(&self, limit: u128) -> Result<CounterProfiles<'_>> {
        let size = self.counterprofile_count();
        if size > limit {
            return Err(Error::Budget {
                what: "counter-profiles",
                size,
                limit,
            });
        }
        Ok(CounterProfiles {
            game: self,
            next: Some(vec![0; self.opponents.len()]),
        })
    }

    /// The counter-profile at position `idx` of [`counterprofiles`](Self::counterprofiles).
    pub fn counterprofile_at(&self, mut idx: u128) -> Option<CounterProfile> {
        if idx >= self.counterprofile_count() {
            return None;
        }
        let mut choice = vec![0; self.opponents.len()];
        for (slot, set) in choice.iter_mut().zip(&self.strategy_sets).rev() {
            let len = set.len() as u128;
            *slot = (idx % len) as usize;
            idx /= len;
        }
        Some(CounterProfile { choice })
    }

    pub fn truthful_profile(&self) -> CounterProfile {
        CounterProfile {
            choice: vec![0; self.opponents.len()],
        }
    }

    fn check_profile(&self, cp: &CounterProfile) -> Result<()> {
        let ok = cp.choice.len() == self.opponents.len()
            && cp.choice.iter().zip(&self.strategy_sets).all(|(&c, s)| c < s.len());
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter("counter-profile does not match the game".into()))
        }
    }

    /// Scores of `V[V*]_{-focal}`: everybody but the focal voter.
    pub fn opponent_scores(&self, cp: &CounterProfile) -> Result<Vec<usize>> {
        self.check_profile(cp)?;
        let mut scores = self.fixed_scores.clone();
        for (set, &c) in self.classes.iter().zip(&cp.choice) {
            for x in set[c].iter() {
                scores[x.0] += 1;
            }
        }
        Ok(scores)
    }

    pub fn outcome_class(&self, focal: &BallotClass, cp: &CounterProfile) -> Result<CandidateId> {
        let mut scores = self.opponent_scores(cp)?;
        for x in focal.iter() {
            scores[x.0] += 1;
        }
        Ok(self.election.winner_of(&scores))
    }

    /// Winner when the focal voter casts `focal` and the opponents play `cp`.
    pub fn outcome(&self, focal: &Ballot, cp: &CounterProfile) -> Result<CandidateId> {
        self.outcome_class(&self.election.class_of(focal), cp)
    }

    /// The ballot an opponent casts under `cp`.
    pub fn chosen_ballot(&self, cp: &CounterProfile, opponent_slot: usize) -> &Ballot {
        &self.strategy_sets[opponent_slot][cp.choice[opponent_slot]]
    }

    /// The literal preference profile `V[V*]` with the focal ballot substituted.
    pub fn realize(&self, focal: &Ballot, cp: &CounterProfile) -> Result<Election> {
        self.check_profile(cp)?;
        let mut e = self.election.with_ballot(self.focal, focal.clone());
        for (j, &i) in self.opponents.iter().enumerate() {
            e = e.with_ballot(i, self.chosen_ballot(cp, j).clone());
        }
        Ok(e)
    }
}

/// Iterator returned by [`GsGame::counterprofiles`].
#[derive(Debug, Clone)]
pub struct CounterProfiles<'a> {
    game: &'a GsGame,
    next: Option<Vec<usize>>,
}

impl Iterator for CounterProfiles<'_> {
    type Item = CounterProfile;

    fn next(&mut self) -> Option<CounterProfile> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut advanced = false;
        for (slot, set) in succ.iter_mut().zip(&self.game.strategy_sets).rev() {
            *slot += 1;
            if *slot < set.len() {
                advanced = true;
                break;
            }
            *slot = 0;
        }
        if advanced {
            self.next = Some(succ);
        }
        Some(CounterProfile { choice: current })
    }
}
