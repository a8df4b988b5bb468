//! Line-oriented election/game files.
//!
//! ```text
//! # two manipulators who cannot both deviate
//! candidates = a b c
//! tiebreak = a b c
//! k = 2
//! voter v1 = b c a
//! voter v2 = b c a
//! voter v3 = a c b
//! voter v4 = c b a
//! focal = v1
//! strategies v2 = level1
//! ballot bac = b a c
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use kapproval::{Ballot, CandidateId, Election, GsGame, StrategyPolicy, TieBreakOrder};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Default strategy policy for manipulators without a `strategies` line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKeyword {
    Truthful,
    Minimal,
    Level1,
}

impl PolicyKeyword {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKeyword::Truthful => "truthful",
            PolicyKeyword::Minimal => "minimal",
            PolicyKeyword::Level1 => "level1",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "truthful" => Some(PolicyKeyword::Truthful),
            "minimal" => Some(PolicyKeyword::Minimal),
            "level1" => Some(PolicyKeyword::Level1),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StrategySpec {
    Rankings(Vec<Vec<String>>),
    Minimal,
    Level1,
}

/// The semantic content of an election file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElectionFile {
    pub candidates: Vec<String>,
    pub tiebreak: Vec<String>,
    pub k: usize,
    pub voters: Vec<(String, Vec<String>)>,
    pub focal: Option<String>,
    pub policy: Option<PolicyKeyword>,
    pub strategies: Vec<(String, StrategySpec)>,
    pub ballots: Vec<(String, Vec<String>)>,
}

struct Line<'a> {
    number: usize,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn err(&self, at: &str, message: impl Into<String>) -> ParseError {
        let offset = at.as_ptr() as usize - self.text.as_ptr() as usize;
        ParseError {
            line: self.number,
            column: self.text[..offset].chars().count() + 1,
            message: message.into(),
        }
    }

    fn err_at_end(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.number,
            column: self.text.chars().count() + 1,
            message: message.into(),
        }
    }
}

fn is_name(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | '\'' | '+'))
}

#[derive(Default)]
struct Builder {
    candidates: Option<Vec<String>>,
    tiebreak: Option<Vec<String>>,
    k: Option<usize>,
    voters: Vec<(String, Vec<String>)>,
    focal: Option<(String, usize, usize)>,
    policy: Option<PolicyKeyword>,
    strategies: Vec<(String, StrategySpec)>,
    strategy_refs: Vec<(String, usize, usize)>,
    ballots: Vec<(String, Vec<String>)>,
}

impl Builder {
    fn names<'a>(&self, line: &Line<'a>, value: &'a str) -> Result<&Vec<String>, ParseError> {
        self.candidates
            .as_ref()
            .ok_or_else(|| line.err(value, "`candidates` must be declared before rankings"))
    }

    fn ranking<'a>(&self, line: &Line<'a>, value: &'a str) -> Result<Vec<String>, ParseError> {
        let names = self.names(line, value)?;
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for tok in value.split_whitespace() {
            if !names.iter().any(|n| n == tok) {
                return Err(line.err(tok, format!("unknown candidate '{tok}'")));
            }
            if !seen.insert(tok) {
                return Err(line.err(tok, format!("candidate '{tok}' ranked twice")));
            }
            out.push(tok.to_string());
        }
        if out.len() != names.len() {
            return Err(line.err_at_end(format!(
                "ranking lists {} of {} candidates",
                out.len(),
                names.len()
            )));
        }
        Ok(out)
    }

    fn line(&mut self, line: &Line<'_>) -> Result<(), ParseError> {
        let content = line.text.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            return Ok(());
        }
        let Some(eq) = content.find('=') else {
            return Err(line.err(content.trim_start(), "expected `key = value`"));
        };
        let lhs = &content[..eq];
        let value = content[eq + 1..].trim();
        let value = if value.is_empty() { &content[content.len()..] } else { value };
        let mut words = lhs.split_whitespace();
        let key = words.next().ok_or_else(|| line.err(&content[eq..], "missing key"))?;
        let arg = words.next();
        if let Some(extra) = words.next() {
            return Err(line.err(extra, "unexpected token before `=`"));
        }
        let named = |what: &str| -> Result<&str, ParseError> {
            let name = arg.ok_or_else(|| line.err(key, format!("`{key}` needs a {what} name")))?;
            if !is_name(name) {
                return Err(line.err(name, format!("invalid {what} name '{name}'")));
            }
            Ok(name)
        };
        let bare = || -> Result<(), ParseError> {
            match arg {
                Some(a) => Err(line.err(a, format!("`{key}` takes no name"))),
                None => Ok(()),
            }
        };
        match key {
            "candidates" => {
                bare()?;
                if self.candidates.is_some() {
                    return Err(line.err(key, "duplicate `candidates` line"));
                }
                let mut names = Vec::new();
                for tok in value.split_whitespace() {
                    if !is_name(tok) {
                        return Err(line.err(tok, format!("invalid candidate name '{tok}'")));
                    }
                    if names.iter().any(|n| n == tok) {
                        return Err(line.err(tok, format!("duplicate candidate '{tok}'")));
                    }
                    names.push(tok.to_string());
                }
                if names.len() < 2 {
                    return Err(line.err(value, "need at least two candidates"));
                }
                self.candidates = Some(names);
            }
            "tiebreak" => {
                bare()?;
                if self.tiebreak.is_some() {
                    return Err(line.err(key, "duplicate `tiebreak` line"));
                }
                self.tiebreak = Some(self.ranking(line, value)?);
            }
            "k" => {
                bare()?;
                if self.k.is_some() {
                    return Err(line.err(key, "duplicate `k` line"));
                }
                let k: usize = value
                    .parse()
                    .map_err(|_| line.err(value, format!("expected a positive integer, got '{value}'")))?;
                let m = self.names(line, value)?.len();
                if k == 0 || k >= m {
                    return Err(line.err(value, format!("k must lie in 1..={}", m - 1)));
                }
                self.k = Some(k);
            }
            "voter" => {
                let name = named("voter")?;
                if self.voters.iter().any(|(n, _)| n == name) {
                    return Err(line.err(name, format!("duplicate voter '{name}'")));
                }
                let ranking = self.ranking(line, value)?;
                self.voters.push((name.to_string(), ranking));
            }
            "focal" => {
                bare()?;
                if self.focal.is_some() {
                    return Err(line.err(key, "duplicate `focal` line"));
                }
                if !is_name(value) {
                    return Err(line.err(value, format!("invalid voter name '{value}'")));
                }
                let col = line.err(value, "").column;
                self.focal = Some((value.to_string(), line.number, col));
            }
            "policy" => {
                bare()?;
                if self.policy.is_some() {
                    return Err(line.err(key, "duplicate `policy` line"));
                }
                let p = PolicyKeyword::parse(value).ok_or_else(|| {
                    line.err(value, format!("unknown policy '{value}' (truthful, minimal, level1)"))
                })?;
                self.policy = Some(p);
            }
            "strategies" => {
                let name = named("voter")?;
                let spec = match value {
                    "minimal" => StrategySpec::Minimal,
                    "level1" => StrategySpec::Level1,
                    _ => StrategySpec::Rankings(vec![self.ranking(line, value)?]),
                };
                let col = line.err(name, "").column;
                match self.strategies.iter_mut().find(|(n, _)| n == name) {
                    None => {
                        self.strategies.push((name.to_string(), spec));
                        self.strategy_refs.push((name.to_string(), line.number, col));
                    }
                    Some((_, StrategySpec::Rankings(list))) => match spec {
                        StrategySpec::Rankings(more) => list.extend(more),
                        _ => {
                            return Err(line.err(value, format!(
                                "voter '{name}' mixes a keyword with explicit rankings"
                            )))
                        }
                    },
                    Some(_) => {
                        return Err(line.err(name, format!("duplicate strategies for voter '{name}'")))
                    }
                }
            }
            "ballot" => {
                let name = named("ballot")?;
                if self.ballots.iter().any(|(n, _)| n == name) {
                    return Err(line.err(name, format!("duplicate ballot '{name}'")));
                }
                let ranking = self.ranking(line, value)?;
                self.ballots.push((name.to_string(), ranking));
            }
            _ => return Err(line.err(key, format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    fn finish(self, last_line: usize) -> Result<ElectionFile, ParseError> {
        let missing = |what: &str| ParseError {
            line: last_line,
            column: 1,
            message: format!("missing `{what}` line"),
        };
        let candidates = self.candidates.ok_or_else(|| missing("candidates"))?;
        let k = self.k.ok_or_else(|| missing("k"))?;
        if self.voters.is_empty() {
            return Err(missing("voter"));
        }
        let known = |name: &str| self.voters.iter().any(|(n, _)| n == name);
        if let Some((name, line, column)) = &self.focal {
            if !known(name) {
                return Err(ParseError {
                    line: *line,
                    column: *column,
                    message: format!("unknown voter '{name}'"),
                });
            }
        }
        for (name, line, column) in &self.strategy_refs {
            if !known(name) {
                return Err(ParseError {
                    line: *line,
                    column: *column,
                    message: format!("unknown voter '{name}'"),
                });
            }
        }
        Ok(ElectionFile {
            tiebreak: self.tiebreak.unwrap_or_else(|| candidates.clone()),
            candidates,
            k,
            voters: self.voters,
            focal: self.focal.map(|(n, _, _)| n),
            policy: self.policy,
            strategies: self.strategies,
            ballots: self.ballots,
        })
    }
}

impl ElectionFile {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut b = Builder::default();
        let mut last = 1;
        for (i, text) in text.lines().enumerate() {
            last = i + 1;
            b.line(&Line { number: i + 1, text })?;
        }
        b.finish(last)
    }

    /// Canonical text; `parse` of the result yields `self` again.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut push = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        push(format!("candidates = {}", self.candidates.join(" ")));
        push(format!("tiebreak = {}", self.tiebreak.join(" ")));
        push(format!("k = {}", self.k));
        for (name, ranking) in &self.voters {
            push(format!("voter {name} = {}", ranking.join(" ")));
        }
        if let Some(f) = &self.focal {
            push(format!("focal = {f}"));
        }
        if let Some(p) = self.policy {
            push(format!("policy = {}", p.as_str()));
        }
        for (name, spec) in &self.strategies {
            match spec {
                StrategySpec::Minimal => push(format!("strategies {name} = minimal")),
                StrategySpec::Level1 => push(format!("strategies {name} = level1")),
                StrategySpec::Rankings(list) => {
                    for r in list {
                        push(format!("strategies {name} = {}", r.join(" ")));
                    }
                }
            }
        }
        for (name, ranking) in &self.ballots {
            push(format!("ballot {name} = {}", ranking.join(" ")));
        }
        out
    }

    fn ids(&self, ranking: &[String]) -> Vec<CandidateId> {
        ranking
            .iter()
            .map(|n| CandidateId(self.candidates.iter().position(|c| c == n).expect("validated name")))
            .collect()
    }

    fn ballot(&self, ranking: &[String]) -> Result<Ballot, CliError> {
        Ok(Ballot::new(self.ids(ranking), self.candidates.len())?)
    }

    pub fn election(&self) -> Result<Election, CliError> {
        let m = self.candidates.len();
        let tiebreak = TieBreakOrder::new(self.ids(&self.tiebreak), m)?;
        let profile = self
            .voters
            .iter()
            .map(|(_, r)| self.ballot(r))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Election::new(self.candidates.clone(), self.k, tiebreak, profile)?)
    }

    pub fn voter_index(&self, name: &str) -> Option<usize> {
        self.voters.iter().position(|(n, _)| n == name)
    }

    pub fn voter_name(&self, index: usize) -> &str {
        &self.voters[index].0
    }

    pub fn focal_index(&self) -> usize {
        self.focal
            .as_deref()
            .and_then(|f| self.voter_index(f))
            .unwrap_or(0)
    }

    pub fn named_ballot(&self, name: &str) -> Option<Result<Ballot, CliError>> {
        self.ballots
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, r)| self.ballot(r))
    }

    /// The GS-game of the file; manipulators without a `strategies` line follow
    /// `policy`, which defaults to every level-1 strategy.
    pub fn game(&self) -> Result<GsGame, CliError> {
        let election = self.election()?;
        let focal = self.focal_index();
        let manipulators = kapproval::manipulation::gs_manipulators(&election);
        let mut sets = BTreeMap::new();
        for (name, spec) in &self.strategies {
            let voter = self.voter_index(name).expect("validated voter");
            if voter == focal {
                return Err(CliError::Semantic(format!(
                    "voter '{name}' is the focal voter and takes no strategies line"
                )));
            }
            if !manipulators.contains(&voter) {
                return Err(CliError::Semantic(format!("voter '{name}' is not a GS-manipulator")));
            }
            let ballots = match spec {
                StrategySpec::Rankings(list) => list.iter().map(|r| self.ballot(r)).collect::<Result<_, _>>()?,
                StrategySpec::Minimal => policy_ballots(&election, voter, PolicyKeyword::Minimal)?,
                StrategySpec::Level1 => policy_ballots(&election, voter, PolicyKeyword::Level1)?,
            };
            sets.insert(voter, ballots);
        }
        let default = self.policy.unwrap_or(PolicyKeyword::Level1);
        for &voter in manipulators.iter().filter(|&&v| v != focal) {
            if let std::collections::btree_map::Entry::Vacant(slot) = sets.entry(voter) {
                slot.insert(policy_ballots(&election, voter, default)?);
            }
        }
        GsGame::build(election, focal, StrategyPolicy::Explicit(sets)).map_err(|e| match e {
            kapproval::Error::InvalidStrategy { voter, reason } => {
                CliError::Semantic(format!("voter '{}': {reason}", self.voter_name(voter)))
            }
            other => other.into(),
        })
    }
}

fn policy_ballots(election: &Election, voter: usize, policy: PolicyKeyword) -> Result<Vec<Ballot>, CliError> {
    let sincere = election.ballot(voter);
    let classes = match policy {
        PolicyKeyword::Truthful => return Ok(Vec::new()),
        PolicyKeyword::Minimal => kapproval::manipulation::minimal_level1_strategies(election, voter)?,
        PolicyKeyword::Level1 => kapproval::manipulation::level1_strategies(election, voter)?.strategies,
    };
    Ok(classes
        .iter()
        .map(|c| kapproval::election::canonical_ballot(c, sincere))
        .collect())
}

impl fmt::Display for ElectionFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}
