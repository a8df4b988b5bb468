//! Elections under k-approval: candidates, ballots, scores, tie-breaking and
//! the top-k equivalence classes of ballots.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};

/// Index of a candidate in the election's name table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateId(pub usize);

impl CandidateId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for CandidateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A complete ranking of the candidates, most preferred first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ballot {
    ranking: Vec<CandidateId>,
    // position[c] = rank of candidate c in `ranking`
    position: Vec<usize>,
}

impl Ballot {
    /// Builds a ballot over `m` candidates; `ranking` must be a permutation of `0..m`.
    pub fn new(ranking: Vec<CandidateId>, m: usize) -> Result<Self> {
        if ranking.len() != m {
            return Err(Error::InvalidElection(format!(
                "ballot ranks {} candidates, expected {m}",
                ranking.len()
            )));
        }
        let mut position = vec![usize::MAX; m];
        for (rank, c) in ranking.iter().enumerate() {
            if c.0 >= m {
                return Err(Error::InvalidElection(format!("unknown candidate {c}")));
            }
            if position[c.0] != usize::MAX {
                return Err(Error::InvalidElection(format!("candidate {c} ranked twice")));
            }
            position[c.0] = rank;
        }
        Ok(Ballot { ranking, position })
    }

    pub fn from_indices(indices: &[usize], m: usize) -> Result<Self> {
        Ballot::new(indices.iter().copied().map(CandidateId).collect(), m)
    }

    pub fn ranking(&self) -> &[CandidateId] {
        &self.ranking
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    pub fn top(&self) -> CandidateId {
        self.ranking[0]
    }

    /// Rank of `c` on this ballot (0 = most preferred).
    #[inline]
    pub fn position(&self, c: CandidateId) -> usize {
        self.position[c.0]
    }

    /// True iff this voter ranks `x` strictly above `y`.
    #[inline]
    pub fn prefers(&self, x: CandidateId, y: CandidateId) -> bool {
        self.position[x.0] < self.position[y.0]
    }

    /// The set of the first `k` candidates.
    pub fn top_k(&self, k: usize) -> Result<BallotClass> {
        if k == 0 || k > self.len() {
            return Err(Error::Parameter(format!(
                "k = {k} outside 1..={}",
                self.len()
            )));
        }
        Ok(BallotClass::new(self.ranking[..k].iter().copied()))
    }

    /// The ballot with `xs[j]` and `ys[j]` transposed for every `j`.
    pub fn swap(&self, xs: &[CandidateId], ys: &[CandidateId]) -> Result<Ballot> {
        if xs.len() != ys.len() {
            return Err(Error::Parameter(format!(
                "swap lists differ in length ({} vs {})",
                xs.len(),
                ys.len()
            )));
        }
        let m = self.len();
        let mut seen = vec![false; m];
        for &c in xs.iter().chain(ys) {
            if c.0 >= m {
                return Err(Error::Parameter(format!("unknown candidate {c}")));
            }
            if seen[c.0] {
                return Err(Error::Parameter(format!(
                    "candidate {c} appears more than once in the swap"
                )));
            }
            seen[c.0] = true;
        }
        let mut ranking = self.ranking.clone();
        for (&x, &y) in xs.iter().zip(ys) {
            ranking.swap(self.position[x.0], self.position[y.0]);
        }
        Ballot::new(ranking, m)
    }
}

/// `v[X; Y]`: transpose `xs[j]` with `ys[j]` for every `j`.
pub fn swap_vote(ballot: &Ballot, xs: &[CandidateId], ys: &[CandidateId]) -> Result<Ballot> {
    ballot.swap(xs, ys)
}

pub fn top_k(ballot: &Ballot, k: usize) -> Result<BallotClass> {
    ballot.top_k(k)
}

/// Two ballots are k-approval equivalent iff they approve the same `k` candidates.
pub fn equivalent(b1: &Ballot, b2: &Ballot, k: usize) -> bool {
    b1.ranking[..k].iter().sorted().eq(b2.ranking[..k].iter().sorted())
}

/// A k-approval equivalence class of ballots, identified by its approved set.
/// The set is stored sorted by candidate index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BallotClass {
    approved: Vec<CandidateId>,
}

impl BallotClass {
    pub fn new(candidates: impl IntoIterator<Item = CandidateId>) -> Self {
        let mut approved: Vec<CandidateId> = candidates.into_iter().collect();
        approved.sort_unstable();
        approved.dedup();
        BallotClass { approved }
    }

    pub fn of(ballot: &Ballot, k: usize) -> Self {
        BallotClass::new(ballot.ranking[..k].iter().copied())
    }

    pub fn approved(&self) -> &[CandidateId] {
        &self.approved
    }

    pub fn len(&self) -> usize {
        self.approved.len()
    }

    pub fn is_empty(&self) -> bool {
        self.approved.is_empty()
    }

    #[inline]
    pub fn contains(&self, c: CandidateId) -> bool {
        self.approved.binary_search(&c).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = CandidateId> + '_ {
        self.approved.iter().copied()
    }

    /// Number of members of `self` missing from `other`.
    pub fn difference_len(&self, other: &BallotClass) -> usize {
        self.iter().filter(|c| !other.contains(*c)).count()
    }
}

/// Deterministic representative of `class`: approved candidates first, then the
/// rest, each group in the order of `reference`.
pub fn canonical_ballot(class: &BallotClass, reference: &Ballot) -> Ballot {
    let (inside, outside): (Vec<CandidateId>, Vec<CandidateId>) =
        reference.ranking.iter().partition(|c| class.contains(**c));
    let ranking = inside.into_iter().chain(outside).collect();
    Ballot::new(ranking, reference.len()).expect("reordering of a valid ballot")
}

/// All `C(m, k)` approval classes in lexicographic order of their sorted members.
pub fn all_classes(m: usize, k: usize) -> impl Iterator<Item = BallotClass> {
    (0..m)
        .map(CandidateId)
        .combinations(k)
        .map(|approved| BallotClass { approved })
}

/// Fixed linear order used to break score ties, highest priority first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TieBreakOrder {
    order: Vec<CandidateId>,
    rank: Vec<usize>,
}

impl TieBreakOrder {
    pub fn new(order: Vec<CandidateId>, m: usize) -> Result<Self> {
        let as_ballot = Ballot::new(order, m)
            .map_err(|e| Error::InvalidElection(format!("tie-break order: {e}")))?;
        Ok(TieBreakOrder {
            order: as_ballot.ranking,
            rank: as_ballot.position,
        })
    }

    /// The identity order `0 > 1 > ... > m-1`.
    pub fn identity(m: usize) -> Self {
        TieBreakOrder {
            order: (0..m).map(CandidateId).collect(),
            rank: (0..m).collect(),
        }
    }

    pub fn order(&self) -> &[CandidateId] {
        &self.order
    }

    #[inline]
    pub fn precedes(&self, x: CandidateId, y: CandidateId) -> bool {
        self.rank[x.0] < self.rank[y.0]
    }

    #[inline]
    pub fn rank(&self, c: CandidateId) -> usize {
        self.rank[c.0]
    }
}

/// An n-voter election over m named candidates under k-approval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Election {
    names: Vec<String>,
    k: usize,
    tiebreak: TieBreakOrder,
    profile: Vec<Ballot>,
}

impl Election {
    pub fn new(
        names: Vec<String>,
        k: usize,
        tiebreak: TieBreakOrder,
        profile: Vec<Ballot>,
    ) -> Result<Self> {
        let m = names.len();
        if names.iter().sorted().dedup().count() != m {
            return Err(Error::InvalidElection("duplicate candidate name".into()));
        }
        if m < 2 {
            return Err(Error::InvalidElection(format!(
                "need at least two candidates, got {m}"
            )));
        }
        if k == 0 || k >= m {
            return Err(Error::InvalidElection(format!(
                "k = {k} outside 1..={}",
                m - 1
            )));
        }
        if profile.is_empty() {
            return Err(Error::InvalidElection("profile has no voters".into()));
        }
        if tiebreak.order.len() != m {
            return Err(Error::InvalidElection(
                "tie-break order does not cover the candidate set".into(),
            ));
        }
        if let Some(i) = profile.iter().position(|b| b.len() != m) {
            return Err(Error::InvalidElection(format!(
                "ballot of voter {i} does not rank all {m} candidates"
            )));
        }
        Ok(Election {
            names,
            k,
            tiebreak,
            profile,
        })
    }

    /// Builds an election from whitespace separated rankings, e.g.
    /// `Election::from_strs(&["a", "b", "c"], 2, "a b c", &["b c a", "a c b"])`.
    pub fn from_strs(candidates: &[&str], k: usize, tiebreak: &str, ballots: &[&str]) -> Result<Self> {
        let names: Vec<String> = candidates.iter().map(|s| s.to_string()).collect();
        let m = names.len();
        let lookup = |s: &str| -> Result<Vec<CandidateId>> {
            s.split_whitespace()
                .map(|tok| {
                    names
                        .iter()
                        .position(|n| n == tok)
                        .map(CandidateId)
                        .ok_or_else(|| Error::InvalidElection(format!("unknown candidate '{tok}'")))
                })
                .collect()
        };
        let tiebreak = TieBreakOrder::new(lookup(tiebreak)?, m)?;
        let profile = ballots
            .iter()
            .map(|b| Ballot::new(lookup(b)?, m))
            .collect::<Result<Vec<_>>>()?;
        Election::new(names, k, tiebreak, profile)
    }

    pub fn candidate_count(&self) -> usize {
        self.names.len()
    }

    pub fn voter_count(&self) -> usize {
        self.profile.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, c: CandidateId) -> &str {
        &self.names[c.0]
    }

    pub fn candidate(&self, name: &str) -> Option<CandidateId> {
        self.names.iter().position(|n| n == name).map(CandidateId)
    }

    pub fn candidates(&self) -> impl Iterator<Item = CandidateId> {
        (0..self.names.len()).map(CandidateId)
    }

    pub fn tiebreak(&self) -> &TieBreakOrder {
        &self.tiebreak
    }

    pub fn profile(&self) -> &[Ballot] {
        &self.profile
    }

    pub fn ballot(&self, voter: usize) -> &Ballot {
        &self.profile[voter]
    }

    pub fn class_of(&self, ballot: &Ballot) -> BallotClass {
        BallotClass::of(ballot, self.k)
    }

    /// The same election with voter `i`'s ballot replaced.
    pub fn with_ballot(&self, voter: usize, ballot: Ballot) -> Election {
        let mut next = self.clone();
        next.profile[voter] = ballot;
        next
    }

    /// k-approval scores of every candidate, indexed by candidate.
    pub fn scores(&self) -> Vec<usize> {
        let mut scores = vec![0; self.candidate_count()];
        for ballot in &self.profile {
            for c in &ballot.ranking[..self.k] {
                scores[c.0] += 1;
            }
        }
        scores
    }

    /// Scores with the listed voters' ballots removed.
    pub fn scores_without(&self, excluded: &[usize]) -> Vec<usize> {
        let mut scores = vec![0; self.candidate_count()];
        for (i, ballot) in self.profile.iter().enumerate() {
            if excluded.contains(&i) {
                continue;
            }
            for c in &ballot.ranking[..self.k] {
                scores[c.0] += 1;
            }
        }
        scores
    }

    pub fn score(&self, c: CandidateId) -> usize {
        self.profile
            .iter()
            .filter(|b| b.position(c) < self.k)
            .count()
    }

    /// Whether `x` with score `sx` beats `y` with score `sy`.
    #[inline]
    pub fn beats_at(&self, x: CandidateId, sx: usize, y: CandidateId, sy: usize) -> bool {
        sx > sy || (sx == sy && self.tiebreak.precedes(x, y))
    }

    pub fn beats(&self, x: CandidateId, y: CandidateId) -> Result<bool> {
        if x == y {
            return Err(Error::Parameter("a candidate cannot beat itself".into()));
        }
        Ok(self.beats_at(x, self.score(x), y, self.score(y)))
    }

    /// Winner for an arbitrary score vector under this election's tie-break order.
    pub fn winner_of(&self, scores: &[usize]) -> CandidateId {
        let mut order = self.tiebreak.order.iter().copied();
        let mut best = order.next().expect("at least two candidates");
        for c in order {
            if scores[c.0] > scores[best.0] {
                best = c;
            }
        }
        best
    }

    pub fn winner(&self) -> CandidateId {
        self.winner_of(&self.scores())
    }

    /// Parses a whitespace separated complete ranking of candidate names.
    pub fn parse_ballot(&self, text: &str) -> Result<Ballot> {
        let ranking = text
            .split_whitespace()
            .map(|tok| {
                self.candidate(tok)
                    .ok_or_else(|| Error::Parameter(format!("unknown candidate '{tok}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ballot::new(ranking, self.candidate_count()).map_err(|e| Error::Parameter(e.to_string()))
    }

    pub fn format_ballot(&self, ballot: &Ballot) -> String {
        ballot.ranking.iter().map(|c| self.name(*c)).join(" ")
    }

    /// `top:{a,b}` with members in candidate index order.
    pub fn format_class(&self, class: &BallotClass) -> String {
        format!("top:{{{}}}", class.iter().map(|c| self.name(c)).join(","))
    }
}

/// `sc_k(c, V)`.
pub fn score_k(c: CandidateId, election: &Election) -> usize {
    election.score(c)
}

pub fn beats(x: CandidateId, y: CandidateId, election: &Election) -> Result<bool> {
    election.beats(x, y)
}

pub fn winner(election: &Election) -> CandidateId {
    election.winner()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn risk_election() -> Election {
        crate::fixtures::two_manipulator_risk()
    }

    fn ids(e: &Election, names: &str) -> Vec<CandidateId> {
        names.split_whitespace().map(|n| e.candidate(n).unwrap()).collect()
    }

    #[test]
    fn top_k_examples() {
        let e = risk_election();
        let b = e.ballot(0);
        assert_eq!(top_k(b, 2).unwrap(), BallotClass::new(ids(&e, "b c")));
        assert_eq!(top_k(b, 3).unwrap(), BallotClass::new(e.candidates()));
        assert!(top_k(b, 0).is_err());
        assert!(top_k(b, 4).is_err());

        let t2 = Election::from_strs(
            &["a", "b", "c", "d"],
            1,
            "a b c d",
            &["a b c d", "b d a c", "c b a d", "d c a b"],
        )
        .unwrap();
        assert_eq!(top_k(t2.ballot(3), 1).unwrap(), BallotClass::new(ids(&t2, "d")));
    }

    #[test]
    fn scores_and_winner_two_manipulators() {
        let e = risk_election();
        let [a, b, c] = [0, 1, 2].map(CandidateId);
        assert_eq!(e.score(c), 4);
        assert_eq!(e.score(b), 3);
        assert_eq!(e.score(a), 1);
        assert_eq!(e.scores(), vec![1, 3, 4]);
        assert!(e.beats(c, b).unwrap());
        assert!(!e.beats(b, c).unwrap());
        assert!(e.beats(a, a).is_err());
        assert_eq!(e.winner(), c);
    }

    #[test]
    fn tie_breaking() {
        // a, b, c all score 2 under plurality
        let e = Election::from_strs(
            &["a", "b", "c"],
            1,
            "a b c",
            &["c a b", "a b c", "a b c", "b a c", "b a c", "c b a"],
        )
        .unwrap();
        let [a, b, _] = [0, 1, 2].map(CandidateId);
        assert_eq!(e.score(a), 2);
        assert_eq!(e.score(b), 2);
        assert!(e.beats(a, b).unwrap());
        assert_eq!(e.winner(), a);
    }

    #[test]
    fn winner_incomparable_and_unanimous() {
        let e = Election::from_strs(
            &["a", "b", "c", "d", "w"],
            1,
            "w d c b a",
            &["a b d w c", "b c d w a", "c d b w a", "d w c a b", "w a b c d"],
        )
        .unwrap();
        assert_eq!(e.name(e.winner()), "w");

        let u = Election::from_strs(&["x", "y", "z"], 2, "z y x", &["y x z"; 3]).unwrap();
        assert_eq!(u.name(u.winner()), "y");

        let single = Election::from_strs(&["x", "y", "z"], 1, "x y z", &["z y x"]).unwrap();
        assert_eq!(single.score(CandidateId(2)), 1);
    }

    #[test]
    fn double_swap_scores() {
        let e = crate::fixtures::dominant_double_swap();
        for name in ["a", "b", "c", "d"] {
            assert_eq!(e.score(e.candidate(name).unwrap()), 2, "{name}");
        }
        for name in ["u1", "u2", "u3", "u4", "u5", "u6"] {
            assert_eq!(e.score(e.candidate(name).unwrap()), 1, "{name}");
        }
    }

    #[test]
    fn swap_vote_examples() {
        let e = Election::from_strs(&["a", "b", "c"], 1, "a b c", &["c b a"]).unwrap();
        let v6 = e.ballot(0);
        let swapped = swap_vote(v6, &ids(&e, "c"), &ids(&e, "b")).unwrap();
        assert_eq!(e.format_ballot(&swapped), "b c a");
        assert_eq!(&swap_vote(v6, &[], &[]).unwrap(), v6);
        assert!(swap_vote(v6, &ids(&e, "a b"), &ids(&e, "c")).is_err());
        assert!(swap_vote(v6, &ids(&e, "a"), &ids(&e, "a")).is_err());

        let t5 = crate::fixtures::dominant_double_swap();
        let v1 = t5.ballot(0);
        let m = swap_vote(v1, &ids(&t5, "u5 u6"), &ids(&t5, "b c")).unwrap();
        assert_eq!(t5.class_of(&m), BallotClass::new(ids(&t5, "b c")));
    }

    #[test]
    fn equivalence_examples() {
        let e = risk_election();
        let cba = e.parse_ballot("c b a").unwrap();
        let bca = e.parse_ballot("b c a").unwrap();
        let abc = e.parse_ballot("a b c").unwrap();
        let bac = e.parse_ballot("b a c").unwrap();
        assert!(equivalent(&cba, &bca, 2));
        assert!(equivalent(&abc, &abc, 1));
        assert!(!equivalent(&abc, &bac, 1));
    }

    #[test]
    fn canonical_ballot_examples() {
        let e = risk_election();
        let reference = e.parse_ballot("b c a").unwrap();
        let bc = BallotClass::new(ids(&e, "b c"));
        assert_eq!(e.format_ballot(&canonical_ballot(&bc, &reference)), "b c a");
        let ac = BallotClass::new(ids(&e, "a c"));
        assert_eq!(e.format_ballot(&canonical_ballot(&ac, &reference)), "c a b");
        let all = BallotClass::new(e.candidates());
        assert_eq!(canonical_ballot(&all, &reference), reference);
    }

    #[test]
    fn rejects_malformed_elections() {
        assert!(Election::from_strs(&["a", "b"], 2, "a b", &["a b"]).is_err());
        assert!(Election::from_strs(&["a", "b"], 1, "a b", &[]).is_err());
        assert!(Election::from_strs(&["a", "a"], 1, "a a", &["a a"]).is_err());
        assert!(Election::from_strs(&["a", "b", "c"], 1, "a b", &["a b c"]).is_err());
        assert!(Election::from_strs(&["a", "b", "c"], 1, "a b c", &["a b"]).is_err());
        assert!(Election::from_strs(&["a", "b", "c"], 1, "a b c", &["a b b"]).is_err());
    }

    #[test]
    fn class_enumeration_counts() {
        assert_eq!(all_classes(5, 2).count(), 10);
        assert_eq!(all_classes(10, 2).count(), 45);
        assert_eq!(all_classes(4, 1).count(), 4);
    }
}
