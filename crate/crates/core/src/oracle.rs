//! Exhaustive reference answers for any `k`: every counter-profile against
//! every focal ballot class.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use crate::dominance::Witness;
use crate::election::{all_classes, Ballot, BallotClass};
use crate::error::{Error, Result};
use crate::game::GsGame;

/// Limits on exhaustive search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_counterprofiles: u128,
    pub max_ballot_classes: u128,
}

impl OracleBudget {
    pub const DEFAULT_LIMIT: u128 = 1_000_000;

    pub fn new(max_counterprofiles: u128, max_ballot_classes: u128) -> Result<Self> {
        if max_counterprofiles == 0 || max_ballot_classes == 0 {
            return Err(Error::Parameter("budgets must be positive".into()));
        }
        Ok(OracleBudget {
            max_counterprofiles,
            max_ballot_classes,
        })
    }

    /// The same limit for counter-profiles and ballot classes.
    pub fn uniform(limit: u128) -> Result<Self> {
        Self::new(limit, limit)
    }
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_counterprofiles: Self::DEFAULT_LIMIT,
            max_ballot_classes: Self::DEFAULT_LIMIT,
        }
    }
}

fn class_count(m: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (m - i) as u128 / (i as u128 + 1))
}

/// Cached outcome vectors are dropped beyond this many entries.
const CACHE_ENTRIES: usize = 1 << 25;

/// Brute-force analyser; outcome vectors per focal class are memoised.
#[derive(Debug)]
pub struct Oracle<'g> {
    game: &'g GsGame,
    budget: OracleBudget,
    ranks: RefCell<HashMap<BallotClass, Vec<u32>>>,
}

impl<'g> Oracle<'g> {
    pub fn new(game: &'g GsGame, budget: OracleBudget) -> Result<Self> {
        let size = game.counterprofile_count();
        if size > budget.max_counterprofiles {
            return Err(Error::Budget {
                what: "counter-profiles",
                size,
                limit: budget.max_counterprofiles,
            });
        }
        Ok(Oracle {
            game,
            budget,
            ranks: RefCell::new(HashMap::new()),
        })
    }

    /// Calls `f` with the opponents' scores of every counter-profile in enumeration order.
    fn for_each_profile(&self, mut f: impl FnMut(&[usize])) {
        let classes = self.game.strategy_classes();
        let mut choice = vec![0usize; classes.len()];
        let mut scores = self
            .game
            .opponent_scores(&self.game.truthful_profile())
            .expect("truthful profile");
        loop {
            f(&scores);
            let mut j = classes.len();
            loop {
                if j == 0 {
                    return;
                }
                j -= 1;
                let old = choice[j];
                let new = if old + 1 < classes[j].len() { old + 1 } else { 0 };
                for c in classes[j][old].iter() {
                    scores[c.0] -= 1;
                }
                for c in classes[j][new].iter() {
                    scores[c.0] += 1;
                }
                choice[j] = new;
                if new != 0 {
                    break;
                }
            }
        }
    }

    pub fn game(&self) -> &GsGame {
        self.game
    }

    fn class(&self, ballot: &Ballot) -> Result<BallotClass> {
        let e = self.game.election();
        if ballot.len() != e.candidate_count() {
            return Err(Error::Parameter("ballot does not rank every candidate".into()));
        }
        Ok(e.class_of(ballot))
    }

    fn check_class(&self, class: &BallotClass) -> Result<()> {
        let e = self.game.election();
        if class.len() != e.k() || class.iter().any(|c| c.0 >= e.candidate_count()) {
            return Err(Error::Parameter(format!("class must approve exactly {} candidates", e.k())));
        }
        Ok(())
    }

    /// Focal preference position of the winner, per counter-profile.
    fn outcome_ranks(&self, class: &BallotClass) -> Vec<u32> {
        if let Some(r) = self.ranks.borrow().get(class) {
            return r.clone();
        }
        let e = self.game.election();
        let focal = self.game.focal_ballot();
        let mut scores = vec![0usize; e.candidate_count()];
        let mut ranks = Vec::with_capacity(self.game.counterprofile_count() as usize);
        self.for_each_profile(|base| {
            scores.copy_from_slice(base);
            for c in class.iter() {
                scores[c.0] += 1;
            }
            ranks.push(focal.position(e.winner_of(&scores)) as u32);
        });
        let mut cache = self.ranks.borrow_mut();
        if (cache.len() + 1) * ranks.len() <= CACHE_ENTRIES {
            cache.insert(class.clone(), ranks.clone());
        }
        ranks
    }

    pub fn strictly_better_witness_class(&self, u: &BallotClass, v: &BallotClass) -> Result<Option<Witness>> {
        self.check_class(u)?;
        self.check_class(v)?;
        let (ru, rv) = (self.outcome_ranks(u), self.outcome_ranks(v));
        let focal = self.game.focal_ballot();
        Ok(ru.iter().zip(&rv).position(|(a, b)| a < b).map(|idx| Witness {
            profile: self
                .game
                .counterprofile_at(idx as u128)
                .expect("index within the enumeration"),
            better: focal.ranking()[ru[idx] as usize],
            worse: focal.ranking()[rv[idx] as usize],
        }))
    }

    pub fn exists_strictly_better_class(&self, u: &BallotClass, v: &BallotClass) -> Result<bool> {
        Ok(self.strictly_better_witness_class(u, v)?.is_some())
    }

    /// At least as good against every counter-profile and strictly better against one.
    pub fn weakly_dominates_class(&self, u: &BallotClass, v: &BallotClass) -> Result<bool> {
        self.check_class(u)?;
        self.check_class(v)?;
        let (ru, rv) = (self.outcome_ranks(u), self.outcome_ranks(v));
        let never_worse = ru.iter().zip(&rv).all(|(a, b)| a <= b);
        Ok(never_worse && ru.iter().zip(&rv).any(|(a, b)| a < b))
    }

    pub fn weakly_dominates(&self, u: &Ballot, v: &Ballot) -> Result<bool> {
        self.weakly_dominates_class(&self.class(u)?, &self.class(v)?)
    }

    pub fn strictly_better_witness(&self, u: &Ballot, v: &Ballot) -> Result<Option<Witness>> {
        self.strictly_better_witness_class(&self.class(u)?, &self.class(v)?)
    }

    fn classes(&self) -> Result<Vec<BallotClass>> {
        let e = self.game.election();
        let size = class_count(e.candidate_count(), e.k());
        if size > self.budget.max_ballot_classes {
            return Err(Error::Budget {
                what: "ballot classes",
                size,
                limit: self.budget.max_ballot_classes,
            });
        }
        Ok(all_classes(e.candidate_count(), e.k()).collect())
    }

    pub fn is_level2_class(&self, v: &BallotClass) -> Result<bool> {
        self.check_class(v)?;
        for u in self.classes()? {
            if self.weakly_dominates_class(&u, v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_improving_class(&self, v: &BallotClass) -> Result<bool> {
        self.weakly_dominates_class(v, &self.game.sincere_class())
    }

    pub fn is_level2(&self, v: &Ballot) -> Result<bool> {
        self.is_level2_class(&self.class(v)?)
    }

    pub fn is_improving(&self, v: &Ballot) -> Result<bool> {
        self.is_improving_class(&self.class(v)?)
    }

    pub fn enumerate_level2(&self) -> Result<BTreeSet<BallotClass>> {
        let classes = self.classes()?;
        let mut out = BTreeSet::new();
        for v in &classes {
            let mut dominated = false;
            for u in &classes {
                if self.weakly_dominates_class(u, v)? {
                    dominated = true;
                    break;
                }
            }
            if !dominated {
                out.insert(v.clone());
            }
        }
        Ok(out)
    }

    pub fn enumerate_improving(&self) -> Result<BTreeSet<BallotClass>> {
        let sincere = self.game.sincere_class();
        let mut out = BTreeSet::new();
        for v in self.classes()? {
            if self.weakly_dominates_class(&v, &sincere)? {
                out.insert(v);
            }
        }
        Ok(out)
    }
}

pub fn oracle_weakly_dominates(game: &GsGame, u: &Ballot, v: &Ballot, budget: OracleBudget) -> Result<bool> {
    Oracle::new(game, budget)?.weakly_dominates(u, v)
}

pub fn oracle_strictly_better_witness(game: &GsGame, u: &Ballot, v: &Ballot, budget: OracleBudget) -> Result<Option<Witness>> {
    Oracle::new(game, budget)?.strictly_better_witness(u, v)
}

pub fn oracle_level2(game: &GsGame, v: &Ballot, budget: OracleBudget) -> Result<bool> {
    Oracle::new(game, budget)?.is_level2(v)
}

pub fn oracle_improving(game: &GsGame, v: &Ballot, budget: OracleBudget) -> Result<bool> {
    Oracle::new(game, budget)?.is_improving(v)
}

pub fn oracle_enumerate_level2(game: &GsGame, budget: OracleBudget) -> Result<BTreeSet<BallotClass>> {
    Oracle::new(game, budget)?.enumerate_level2()
}

pub fn oracle_enumerate_improving(game: &GsGame, budget: OracleBudget) -> Result<BTreeSet<BallotClass>> {
    Oracle::new(game, budget)?.enumerate_improving()
}
