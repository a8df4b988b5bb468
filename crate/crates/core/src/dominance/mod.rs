//! Polynomial dominance tests for GS-games whose strategy sets a flow network
//! can represent exactly.
//!
//! Each opponent's strategy set is encoded as "always approve `I`, plus any
//! `k - |I|` of `F`" where `I` is the intersection of its classes and `F` the
//! rest of their union. For Plurality and for minimal 2-approval games this
//! describes the set exactly.
//!
//! `u` is strictly better than `v` against some counter-profile iff there are
//! winners `X` (under `u`) and `Y` (under `v`) with `X ≻ Y` for the focal
//! voter. Fixing the opponents' scores `t` of `X` and `r'` of `Y`, the
//! requirement on every other candidate is an upper bound, so one flow query
//! per `(X, Y, t, r')` decides the question.

pub mod plurality;
pub mod two_approval;

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use crate::election::{all_classes, Ballot, BallotClass, CandidateId, Election};
use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::game::{CounterProfile, GsGame};

/// Offset of a candidate's bound from `r` in a [`ScoreQuery`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Plus1,
    Zero,
    Minus1,
    Minus2,
}

impl Level {
    pub fn offset(self) -> i64 {
        match self {
            Level::Plus1 => 1,
            Level::Zero => 0,
            Level::Minus1 => -1,
            Level::Minus2 => -2,
        }
    }

    pub fn from_offset(offset: i64) -> Option<Level> {
        match offset {
            1 => Some(Level::Plus1),
            0 => Some(Level::Zero),
            -1 => Some(Level::Minus1),
            -2 => Some(Level::Minus2),
            _ => None,
        }
    }
}

/// Targets on the opponents' scores (the focal voter excluded): `x` scores
/// exactly `r`, `y` exactly `r_prime`, and every other `c` at most
/// `r + level(c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreQuery {
    pub x: CandidateId,
    pub y: CandidateId,
    pub r: i64,
    pub r_prime: i64,
    /// One entry per candidate; `None` exactly at `x` and `y`.
    pub levels: Vec<Option<Level>>,
}

impl ScoreQuery {
    /// A query that puts every other candidate on the same level.
    pub fn uniform(m: usize, x: CandidateId, y: CandidateId, r: i64, r_prime: i64, level: Level) -> Self {
        let levels = (0..m)
            .map(|c| (c != x.0 && c != y.0).then_some(level))
            .collect();
        ScoreQuery { x, y, r, r_prime, levels }
    }

    fn validate(&self, m: usize) -> Result<()> {
        let shape_ok = self.x != self.y
            && self.x.0 < m
            && self.y.0 < m
            && self.levels.len() == m
            && self
                .levels
                .iter()
                .enumerate()
                .all(|(c, l)| l.is_none() == (c == self.x.0 || c == self.y.0));
        if shape_ok {
            Ok(())
        } else {
            Err(Error::Parameter(
                "score query must have x != y and a level for every other candidate".into(),
            ))
        }
    }
}

/// A counter-profile under which one focal ballot beats another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub profile: CounterProfile,
    /// Winner under the better ballot.
    pub better: CandidateId,
    /// Winner under the worse ballot.
    pub worse: CandidateId,
}

#[derive(Debug, Clone)]
struct Variable {
    free: Vec<CandidateId>,
    need: i64,
}

/// Flow encoding of a game plus per-candidate score ranges.
#[derive(Debug, Clone)]
struct Encoding {
    m: usize,
    k: usize,
    fixed: Vec<i64>,
    hi: Vec<i64>,
    vars: Vec<(usize, Variable)>,
    cand_free: Vec<bool>,
}

fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

impl Encoding {
    fn new(game: &GsGame) -> Result<Self> {
        let e = game.election();
        let m = e.candidate_count();
        let k = e.k();
        let mut fixed: Vec<i64> = game.fixed_scores().iter().map(|&s| s as i64).collect();
        let mut hi = fixed.clone();
        let mut vars = Vec::new();
        for (slot, classes) in game.strategy_classes().iter().enumerate() {
            let common: BTreeSet<CandidateId> = classes
                .iter()
                .skip(1)
                .fold(classes[0].iter().collect(), |acc, c| {
                    acc.intersection(&c.iter().collect()).copied().collect()
                });
            let union: BTreeSet<CandidateId> = classes.iter().flat_map(|c| c.iter()).collect();
            let free: Vec<CandidateId> = union.difference(&common).copied().collect();
            let need = k - common.len();
            if binomial(free.len(), need) != classes.len() as u128 {
                return Err(Error::NonMinimal {
                    voter: game.opponents()[slot],
                });
            }
            for c in &common {
                fixed[c.0] += 1;
                hi[c.0] += 1;
            }
            if need > 0 && need < free.len() {
                for c in &free {
                    hi[c.0] += 1;
                }
                vars.push((slot, Variable { free, need: need as i64 }));
            } else if need > 0 {
                for c in &free {
                    fixed[c.0] += 1;
                    hi[c.0] += 1;
                }
            }
        }
        let mut cand_free = vec![false; m];
        for (_, v) in &vars {
            for c in &v.free {
                cand_free[c.0] = true;
            }
        }
        Ok(Encoding {
            m,
            k,
            fixed,
            hi,
            vars,
            cand_free,
        })
    }

    /// Exact-score targets at `x`, `y` and upper bounds elsewhere.
    fn realize(&self, x: CandidateId, r: i64, y: CandidateId, r_prime: i64, ub: &[i64]) -> Option<Vec<BTreeSet<CandidateId>>> {
        let in_range = |c: CandidateId, s: i64| self.fixed[c.0] <= s && s <= self.hi[c.0];
        if !in_range(x, r) || !in_range(y, r_prime) {
            return None;
        }
        let mut lower = vec![0i64; self.m];
        let mut upper = vec![0i64; self.m];
        let mut total_upper = 0i64;
        for c in 0..self.m {
            let (lo, up) = if c == x.0 {
                (r, r)
            } else if c == y.0 {
                (r_prime, r_prime)
            } else {
                (0, ub[c].min(self.hi[c]))
            };
            if up < self.fixed[c] {
                return None;
            }
            lower[c] = (lo - self.fixed[c]).max(0);
            upper[c] = up - self.fixed[c];
            total_upper += upper[c];
        }
        let supply: i64 = self.vars.iter().map(|(_, v)| v.need).sum();
        let total_lower: i64 = lower.iter().sum();
        if total_lower > supply || total_upper < supply {
            return None;
        }
        if self.vars.is_empty() {
            return Some(Vec::new());
        }

        let (source, sink) = (0, 1);
        let voter_node = |j: usize| 2 + j;
        let cand_node = |c: usize| 2 + self.vars.len() + c;
        let mut net = FlowNetwork::<i64>::new(2 + self.vars.len() + self.m, source, sink);
        let mut choice_arcs = Vec::with_capacity(self.vars.len());
        for (j, (_, v)) in self.vars.iter().enumerate() {
            net.add_arc(source, voter_node(j), v.need, v.need);
            let arcs: Vec<(usize, CandidateId)> = v
                .free
                .iter()
                .map(|&c| (net.add_arc(voter_node(j), cand_node(c.0), 0, 1), c))
                .collect();
            choice_arcs.push(arcs);
        }
        for c in 0..self.m {
            if self.cand_free[c] {
                net.add_arc(cand_node(c), sink, lower[c], upper[c]);
            } else if lower[c] > 0 {
                return None;
            }
        }
        let flow = net.feasible_flow()?;
        Some(
            choice_arcs
                .iter()
                .map(|arcs| {
                    arcs.iter()
                        .filter(|(id, _)| flow.flow[*id] == 1)
                        .map(|&(_, c)| c)
                        .collect()
                })
                .collect(),
        )
    }
}

/// Dominance relations of the focal voter's ballot classes, with memoised
/// strictly-better answers.
#[derive(Debug)]
pub struct FlowDominance<'g> {
    game: &'g GsGame,
    enc: Encoding,
    cache: RefCell<HashMap<(BallotClass, BallotClass), bool>>,
}

impl<'g> FlowDominance<'g> {
    /// Builds the engine; fails if some strategy set is not representable.
    pub fn new(game: &'g GsGame) -> Result<Self> {
        Ok(FlowDominance {
            game,
            enc: Encoding::new(game)?,
            cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn game(&self) -> &GsGame {
        self.game
    }

    fn election(&self) -> &Election {
        self.game.election()
    }

    fn class(&self, ballot: &Ballot) -> Result<BallotClass> {
        let e = self.election();
        if ballot.len() != e.candidate_count() {
            return Err(Error::Parameter("ballot does not rank every candidate".into()));
        }
        Ok(e.class_of(ballot))
    }

    fn profile_from(&self, chosen: Vec<BTreeSet<CandidateId>>) -> CounterProfile {
        let mut cp = self.game.truthful_profile();
        let classes = self.game.strategy_classes();
        for ((slot, _), free_pick) in self.enc.vars.iter().zip(chosen) {
            let idx = classes[*slot]
                .iter()
                .position(|c| free_pick.iter().all(|x| c.contains(*x)))
                .expect("flow choice corresponds to a strategy");
            cp.choice[*slot] = idx;
        }
        cp
    }

    /// Does some counter-profile meet the score targets of `q`?
    pub fn alg(&self, q: &ScoreQuery) -> Result<bool> {
        Ok(self.alg_witness(q)?.is_some())
    }

    pub fn alg_witness(&self, q: &ScoreQuery) -> Result<Option<CounterProfile>> {
        q.validate(self.enc.m)?;
        let ub: Vec<i64> = q
            .levels
            .iter()
            .map(|l| l.map_or(i64::MAX / 4, |l| q.r + l.offset()))
            .collect();
        Ok(self
            .enc
            .realize(q.x, q.r, q.y, q.r_prime, &ub)
            .map(|chosen| self.profile_from(chosen)))
    }

    fn sweep(&self, a: &BallotClass, b: &BallotClass) -> Option<Witness> {
        let e = self.election();
        let focal = self.game.focal_ballot();
        let tb = e.tiebreak();
        let m = self.enc.m;
        let ind = |p: bool| i64::from(p);
        let mut ub = vec![0i64; m];
        for x in e.candidates() {
            for y in e.candidates() {
                if x == y || !focal.prefers(x, y) || !(a.contains(x) || b.contains(y)) {
                    continue;
                }
                let (xa, xb) = (ind(a.contains(x)), ind(b.contains(x)));
                let (ya, yb) = (ind(a.contains(y)), ind(b.contains(y)));
                let (x_first, y_first) = (ind(tb.precedes(x, y)), ind(tb.precedes(y, x)));
                for t in self.enc.fixed[x.0]..=self.enc.hi[x.0] {
                    let lo_r = self.enc.fixed[y.0].max(t + xb - yb + x_first);
                    let hi_r = self.enc.hi[y.0].min(t + xa - ya - y_first);
                    for r_prime in lo_r..=hi_r {
                        let mut dead = false;
                        for c in e.candidates() {
                            if c == x || c == y {
                                continue;
                            }
                            let under_u = t + xa - ind(a.contains(c)) - ind(tb.precedes(c, x));
                            let under_v = r_prime + yb - ind(b.contains(c)) - ind(tb.precedes(c, y));
                            let bound = under_u.min(under_v);
                            if bound < self.enc.fixed[c.0] {
                                dead = true;
                                break;
                            }
                            ub[c.0] = bound;
                        }
                        if dead {
                            continue;
                        }
                        if let Some(chosen) = self.enc.realize(x, t, y, r_prime, &ub) {
                            return Some(Witness {
                                profile: self.profile_from(chosen),
                                better: x,
                                worse: y,
                            });
                        }
                    }
                }
            }
        }
        None
    }

    fn check_distinct(&self, a: &BallotClass, b: &BallotClass) -> Result<()> {
        if a == b {
            Err(Error::Parameter("ballots are equivalent".into()))
        } else {
            Ok(())
        }
    }

    /// A counter-profile where class `a` yields a strictly better winner than class `b`.
    pub fn strictly_better_witness_class(&self, a: &BallotClass, b: &BallotClass) -> Result<Option<Witness>> {
        self.check_class(a)?;
        self.check_class(b)?;
        self.check_distinct(a, b)?;
        let w = self.sweep(a, b);
        self.cache.borrow_mut().insert((a.clone(), b.clone()), w.is_some());
        Ok(w)
    }

    fn check_class(&self, a: &BallotClass) -> Result<()> {
        let e = self.election();
        if a.len() != e.k() || a.iter().any(|c| c.0 >= e.candidate_count()) {
            return Err(Error::Parameter(format!("class must approve exactly {} candidates", e.k())));
        }
        Ok(())
    }

    pub fn exists_strictly_better_class(&self, a: &BallotClass, b: &BallotClass) -> Result<bool> {
        if let Some(&hit) = self.cache.borrow().get(&(a.clone(), b.clone())) {
            return Ok(hit);
        }
        Ok(self.strictly_better_witness_class(a, b)?.is_some())
    }

    pub fn weakly_dominates_class(&self, a: &BallotClass, b: &BallotClass) -> Result<bool> {
        self.check_class(a)?;
        self.check_class(b)?;
        if a == b {
            return Ok(false);
        }
        Ok(self.exists_strictly_better_class(a, b)? && !self.exists_strictly_better_class(b, a)?)
    }

    pub fn exists_strictly_better(&self, u: &Ballot, v: &Ballot) -> Result<bool> {
        self.exists_strictly_better_class(&self.class(u)?, &self.class(v)?)
    }

    pub fn strictly_better_witness(&self, u: &Ballot, v: &Ballot) -> Result<Option<Witness>> {
        self.strictly_better_witness_class(&self.class(u)?, &self.class(v)?)
    }

    pub fn weakly_dominates(&self, u: &Ballot, v: &Ballot) -> Result<bool> {
        self.weakly_dominates_class(&self.class(u)?, &self.class(v)?)
    }

    fn all_classes(&self) -> Vec<BallotClass> {
        all_classes(self.enc.m, self.enc.k).collect()
    }

    pub fn is_level2_class(&self, v: &BallotClass) -> Result<bool> {
        self.check_class(v)?;
        for u in self.all_classes() {
            if &u != v && self.weakly_dominates_class(&u, v)? {
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
        let mut out = BTreeSet::new();
        for v in self.all_classes() {
            if self.is_level2_class(&v)? {
                out.insert(v);
            }
        }
        Ok(out)
    }

    pub fn enumerate_improving(&self) -> Result<BTreeSet<BallotClass>> {
        let mut out = BTreeSet::new();
        for v in self.all_classes() {
            if self.is_improving_class(&v)? {
                out.insert(v);
            }
        }
        Ok(out)
    }
}
