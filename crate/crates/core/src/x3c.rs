//! Exact Cover by 3-Sets instances and the GS-games built from them under
//! k-approval (`k >= 4`).
//!
//! In the generated game voter 0 has three distinguished ballots `z0`
//! (sincere), `z0'` and `z0''`. `z0'` weakly dominates both others exactly
//! when the padded instance has no exact cover.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::election::{Ballot, CandidateId, Election, TieBreakOrder};
use crate::error::{Error, Result};
use crate::game::{CounterProfile, GsGame, StrategyPolicy};
use crate::manipulation;

/// Ground set `0..ground_size` and a list of 3-element subsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct X3CInstance {
    ground_size: usize,
    triples: Vec<[usize; 3]>,
}

impl X3CInstance {
    /// Elements are 0-based; each triple is stored sorted.
    pub fn new(ground_size: usize, triples: Vec<[usize; 3]>) -> Result<Self> {
        if ground_size == 0 || !ground_size.is_multiple_of(3) {
            return Err(Error::X3c(format!(
                "ground set size {ground_size} is not a positive multiple of 3"
            )));
        }
        let mut sorted = Vec::with_capacity(triples.len());
        for (j, mut t) in triples.into_iter().enumerate() {
            t.sort_unstable();
            if t[2] >= ground_size {
                return Err(Error::X3c(format!("set {} mentions element {} outside the ground set", j + 1, t[2] + 1)));
            }
            if t[0] == t[1] || t[1] == t[2] {
                return Err(Error::X3c(format!("set {} repeats an element", j + 1)));
            }
            sorted.push(t);
        }
        Ok(X3CInstance {
            ground_size,
            triples: sorted,
        })
    }

    /// Reads `elements N` followed by one line of three 1-based elements per set.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ground = None;
        let mut triples = Vec::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let at = |msg: &str| Error::X3c(format!("line {}: {msg}", no + 1));
            match (ground, fields.as_slice()) {
                (None, ["elements", n]) => {
                    ground = Some(n.parse::<usize>().map_err(|_| at("element count is not a number"))?);
                }
                (None, _) => return Err(at("expected `elements <count>`")),
                (Some(_), [a, b, c]) => {
                    let mut t = [0usize; 3];
                    for (slot, f) in t.iter_mut().zip([a, b, c]) {
                        let v: usize = f.parse().map_err(|_| at("element is not a number"))?;
                        if v == 0 {
                            return Err(at("elements are numbered from 1"));
                        }
                        *slot = v - 1;
                    }
                    triples.push(t);
                }
                (Some(_), _) => return Err(at("a set needs exactly three elements")),
            }
        }
        let ground = ground.ok_or_else(|| Error::X3c("missing `elements <count>` line".into()))?;
        X3CInstance::new(ground, triples)
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    /// `ν`, the size of an exact cover.
    pub fn nu(&self) -> usize {
        self.ground_size / 3
    }

    pub fn mu(&self) -> usize {
        self.triples.len()
    }

    /// Whether the sets with the given indices form an exact cover.
    pub fn is_exact_cover(&self, chosen: &[usize]) -> bool {
        let mut seen = vec![false; self.ground_size];
        for &j in chosen {
            for &g in &self.triples[j] {
                if std::mem::replace(&mut seen[g], true) {
                    return false;
                }
            }
        }
        seen.iter().all(|&s| s)
    }
}

impl fmt::Display for X3CInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "elements {}", self.ground_size)?;
        for t in &self.triples {
            writeln!(f, "{} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
        }
        Ok(())
    }
}

/// Adds a fresh covering triple (renumbered to the first three elements)
/// and a chain of `ν'+2` triples with their shifted companion sets, so that
/// element 0 lies in exactly one set and a ready-made non-cover exists.
pub fn pad_instance(raw: &X3CInstance) -> X3CInstance {
    let nu0 = raw.nu();
    let chain = nu0 + 2;
    let x = |i: usize| 3 + raw.ground_size + 3 * i;
    let mut triples: Vec<[usize; 3]> = raw
        .triples
        .iter()
        .map(|t| [t[0] + 3, t[1] + 3, t[2] + 3])
        .collect();
    triples.push([0, 1, 2]);
    for i in 0..chain {
        triples.push([x(i), x(i) + 1, x(i) + 2]);
    }
    for i in 0..chain {
        triples.push([x(i) + 1, x(i) + 2, x((i + 1) % chain)]);
    }
    X3CInstance::new(3 + raw.ground_size + 3 * chain, triples).expect("padding keeps instances valid")
}

/// Indices of the added chain sets in a padded instance.
pub fn chain_sets(padded: &X3CInstance) -> Vec<usize> {
    let chain = (padded.nu() - 3) / 2 + 2;
    (padded.mu() - 2 * chain..padded.mu()).collect()
}

/// Largest ground set [`solve_x3c`] accepts.
pub const DEFAULT_SOLVE_LIMIT: usize = 150;

/// An exact cover by backtracking on the lowest uncovered element.
pub fn find_exact_cover(inst: &X3CInstance, max_ground: usize) -> Result<Option<Vec<usize>>> {
    if inst.ground_size > max_ground {
        return Err(Error::Budget {
            what: "ground-set elements",
            size: inst.ground_size as u128,
            limit: max_ground as u128,
        });
    }
    let mut by_element = vec![Vec::new(); inst.ground_size];
    for (j, t) in inst.triples.iter().enumerate() {
        by_element[t[0]].push(j);
    }
    fn go(inst: &X3CInstance, by_min: &[Vec<usize>], covered: &mut [bool], chosen: &mut Vec<usize>) -> bool {
        let Some(g) = covered.iter().position(|c| !c) else {
            return true;
        };
        for &j in &by_min[g] {
            let t = inst.triples[j];
            if t.iter().any(|&e| covered[e]) {
                continue;
            }
            t.iter().for_each(|&e| covered[e] = true);
            chosen.push(j);
            if go(inst, by_min, covered, chosen) {
                return true;
            }
            chosen.pop();
            t.iter().for_each(|&e| covered[e] = false);
        }
        false
    }
    let mut covered = vec![false; inst.ground_size];
    let mut chosen = Vec::new();
    // the lowest uncovered element is always the minimum of the next set
    Ok(go(inst, &by_element, &mut covered, &mut chosen).then_some(chosen))
}

pub fn solve_x3c(inst: &X3CInstance) -> Result<bool> {
    Ok(find_exact_cover(inst, DEFAULT_SOLVE_LIMIT)?.is_some())
}

/// Candidate and voter bookkeeping of a generated game.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roles {
    pub w: CandidateId,
    pub c: CandidateId,
    pub p: CandidateId,
    /// `c_1..c_{3ν}`, one per ground element.
    pub element: Vec<CandidateId>,
    /// `D_0..D_μ`, four dummies each.
    pub d: Vec<Vec<CandidateId>>,
    pub d_c: Vec<CandidateId>,
    /// `E_1..E_{ν+1}`.
    pub e: Vec<Vec<CandidateId>>,
    /// `F_{i,j}` indexed `[i][j]`.
    pub f: Vec<Vec<Vec<CandidateId>>>,
    /// One padding group per voter when `k > 4`.
    pub h: Vec<Vec<CandidateId>>,
    /// Voter `j` for `j in 1..=μ` corresponds to set `j - 1`.
    pub set_voters: Vec<usize>,
    pub voter_names: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ReductionOutput {
    pub instance: X3CInstance,
    pub game: GsGame,
    pub z0: Ballot,
    pub z0_prime: Ballot,
    pub z0_dprime: Ballot,
    pub roles: Roles,
}

impl ReductionOutput {
    /// The counter-profile in which exactly the voters of the given sets manipulate.
    pub fn profile_for_sets(&self, sets: &[usize]) -> CounterProfile {
        let mut cp = self.game.truthful_profile();
        for &j in sets {
            let voter = self.roles.set_voters[j];
            let slot = self
                .game
                .opponents()
                .iter()
                .position(|&i| i == voter)
                .expect("set voters are players");
            cp.choice[slot] = 1;
        }
        cp
    }
}

struct Layout {
    names: Vec<String>,
}

impl Layout {
    fn add(&mut self, name: String) -> CandidateId {
        self.names.push(name);
        CandidateId(self.names.len() - 1)
    }

    fn group(&mut self, size: usize, name: impl Fn(usize) -> String) -> Vec<CandidateId> {
        (1..=size).map(|l| self.add(name(l))).collect()
    }
}

/// Builds the GS-game of an already padded instance for `k`-approval.
pub fn build_game(inst: &X3CInstance, k: usize) -> Result<ReductionOutput> {
    if k < 4 {
        return Err(Error::Parameter(format!("the reduction needs k >= 4, got {k}")));
    }
    let nu = inst.nu();
    let mu = inst.mu();
    if mu == 0 {
        return Err(Error::X3c("instance has no sets".into()));
    }
    let voters = 2 + mu + (3 * nu + 1) * (nu + 1);

    let mut lay = Layout { names: Vec::new() };
    let w = lay.add("w".into());
    let c = lay.add("c".into());
    let p = lay.add("p".into());
    let element: Vec<CandidateId> = (1..=3 * nu).map(|i| lay.add(format!("c{i}"))).collect();
    let d: Vec<Vec<CandidateId>> = (0..=mu).map(|i| lay.group(4, |l| format!("d{i}_{l}"))).collect();
    let d_c = lay.group(3, |l| format!("dc_{l}"));
    let e: Vec<Vec<CandidateId>> = (1..=nu + 1).map(|j| lay.group(2, |l| format!("e{j}_{l}"))).collect();
    let f: Vec<Vec<Vec<CandidateId>>> = (1..=3 * nu)
        .map(|i| (1..=nu + 1).map(|j| lay.group(3, |l| format!("f{i}_{j}_{l}"))).collect())
        .collect();
    let h: Vec<Vec<CandidateId>> = if k > 4 {
        (0..voters).map(|v| lay.group(k - 4, |l| format!("h{v}_{l}"))).collect()
    } else {
        Vec::new()
    };
    let m = lay.names.len();

    let mut prefixes: Vec<Vec<CandidateId>> = Vec::with_capacity(voters);
    let mut voter_names = Vec::with_capacity(voters);
    let mut z0 = d[0].clone();
    z0.extend([p, element[0], c]);
    z0.extend(element[1..].iter().copied());
    prefixes.push(z0);
    voter_names.push("z0".to_string());
    for (j, t) in inst.triples.iter().enumerate() {
        let mut z = d[j + 1].clone();
        z.extend(t.iter().map(|&g| element[g]));
        z.push(c);
        prefixes.push(z);
        voter_names.push(format!("z{}", j + 1));
    }
    let mut u = vec![c];
    u.extend(&d_c);
    u.push(w);
    prefixes.push(u);
    voter_names.push("u".into());
    for (j, ej) in e.iter().enumerate() {
        let mut v = vec![w, p];
        v.extend(ej);
        prefixes.push(v);
        voter_names.push(format!("u{}", j + 1));
    }
    for (i, fi) in f.iter().enumerate() {
        for (j, fij) in fi.iter().enumerate() {
            let mut v = vec![element[i]];
            v.extend(fij);
            v.push(w);
            prefixes.push(v);
            voter_names.push(format!("u{}_{}", i + 1, j + 1));
        }
    }
    debug_assert_eq!(prefixes.len(), voters);

    let profile: Vec<Ballot> = prefixes
        .iter()
        .enumerate()
        .map(|(v, prefix)| {
            let mut ranking: Vec<CandidateId> = prefix[..4].to_vec();
            if k > 4 {
                ranking.extend(&h[v]);
            }
            ranking.extend(&prefix[4..]);
            let placed: BTreeSet<CandidateId> = ranking.iter().copied().collect();
            ranking.extend((0..m).map(CandidateId).filter(|x| !placed.contains(x)));
            Ballot::new(ranking, m)
        })
        .collect::<Result<_>>()?;

    let election = Election::new(lay.names, k, TieBreakOrder::identity(m), profile)?;
    check_truthful_scores(&election, nu, w, c, p, &element)?;

    let expected: BTreeSet<usize> = (0..=mu).collect();
    let found = manipulation::gs_manipulators(&election);
    if found != expected {
        return Err(Error::X3c(format!("manipulators are {found:?}, expected voters 0..={mu}")));
    }
    let competitive = manipulation::competitive_sets(&election).union();
    let expected_s: BTreeSet<CandidateId> = element.iter().copied().chain([p]).collect();
    if competitive != expected_s {
        return Err(Error::X3c("competitive set differs from C' and p".into()));
    }

    let mut sets = BTreeMap::new();
    for (j, t) in inst.triples.iter().enumerate() {
        let voter = j + 1;
        let sincere = election.ballot(voter).clone();
        let swap_in: Vec<CandidateId> = t.iter().map(|&g| element[g]).chain([c]).collect();
        let manipulated = sincere.swap(&d[voter], &swap_in)?;
        sets.insert(voter, vec![sincere, manipulated]);
    }
    let z0 = election.ballot(0).clone();
    let z0_prime = z0.swap(&d[0][..2], &[p, c])?;
    let z0_dprime = z0.swap(&d[0][..1], &[p])?;
    let game = GsGame::build(election, 0, StrategyPolicy::Explicit(sets))?;

    Ok(ReductionOutput {
        instance: inst.clone(),
        game,
        z0,
        z0_prime,
        z0_dprime,
        roles: Roles {
            w,
            c,
            p,
            element,
            d,
            d_c,
            e,
            f,
            h,
            set_voters: (1..=mu).collect(),
            voter_names,
        },
    })
}

fn check_truthful_scores(
    election: &Election,
    nu: usize,
    w: CandidateId,
    c: CandidateId,
    p: CandidateId,
    element: &[CandidateId],
) -> Result<()> {
    let scores = election.scores();
    let fail = |what: &str| Err(Error::X3c(format!("truthful score check failed: {what}")));
    if scores[w.0] != nu + 1 || scores[p.0] != nu + 1 {
        return fail("w and p must score nu + 1");
    }
    if element.iter().any(|x| scores[x.0] != nu + 1) {
        return fail("every element candidate must score nu + 1");
    }
    if scores[c.0] != 1 {
        return fail("c must score 1");
    }
    let special = 3 + element.len();
    if scores[special..].iter().any(|&s| s > 1) {
        return fail("dummies must score at most 1");
    }
    if election.winner() != w {
        return fail("w must win");
    }
    Ok(())
}

/// Pads `raw` and builds its game.
pub fn generate(raw: &X3CInstance, k: usize) -> Result<ReductionOutput> {
    build_game(&pad_instance(raw), k)
}
