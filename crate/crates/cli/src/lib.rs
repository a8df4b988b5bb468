//! The `kapproval` command line: file parsing, engine selection and report rendering.

pub mod format;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use kapproval::dominance::{plurality, two_approval};
use kapproval::election::canonical_ballot;
use kapproval::manipulation;
use kapproval::{Ballot, BallotClass, CandidateId, Election, FlowDominance, GsGame, Oracle, OracleBudget, Witness, X3CInstance};

pub use format::{ElectionFile, ParseError, PolicyKeyword, StrategySpec};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: {error}")]
    Parse { path: String, error: ParseError },
    #[error("{0}")]
    Semantic(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] kapproval::Error),
}

impl CliError {
    /// 2 for an exhausted search budget, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(kapproval::Error::Budget { .. }) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineChoice {
    Flow,
    Oracle,
}

#[derive(Debug, Parser)]
#[command(name = "kapproval", version, about = "Strategic voting analysis for k-approval elections")]
pub struct Cli {
    /// Dominance engine; by default flow for Plurality and minimal 2-approval games, oracle otherwise.
    #[arg(long, global = true, value_enum)]
    pub engine: Option<EngineChoice>,
    /// Emit a JSON object instead of plain text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Print a realizing counter-profile for a true dominance verdict.
    #[arg(long, global = true)]
    pub witness: bool,
    /// Counter-profile and ballot-class limit of the exhaustive oracle.
    #[arg(long, global = true, env = "KAPPROVAL_BUDGET")]
    pub budget: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Winner, scores, manipulators, competitive sets and feasible targets.
    Analyze { file: PathBuf },
    /// Level-1 strategies of one voter.
    Level1 { file: PathBuf, voter: String },
    /// Whether focal ballot U weakly dominates V.
    Dominates { file: PathBuf, u: String, v: String },
    /// Level-2 classes of the focal voter, or a verdict for one vote.
    Level2 { file: PathBuf, vote: Option<String> },
    /// Improving level-2 classes, or a verdict for one vote.
    Improving { file: PathBuf, vote: Option<String> },
    /// Run a query on the exhaustive oracle.
    Oracle {
        #[command(subcommand)]
        query: OracleQuery,
    },
    /// Build the game of an exact-cover instance and print it as an election file.
    GenX3c {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        k: usize,
        /// The instance is already padded.
        #[arg(long)]
        padded: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleQuery {
    Dominates { file: PathBuf, u: String, v: String },
    Level2 { file: PathBuf, vote: Option<String> },
    Improving { file: PathBuf, vote: Option<String> },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn load(path: &Path) -> Result<ElectionFile, CliError> {
    ElectionFile::parse(&read(path)?).map_err(|error| CliError::Parse {
        path: path.display().to_string(),
        error,
    })
}

enum Analyzer<'g> {
    Flow(FlowDominance<'g>),
    Oracle(Oracle<'g>),
}

impl<'g> Analyzer<'g> {
    fn select(game: &'g GsGame, requested: Option<EngineChoice>, budget: OracleBudget) -> Result<Self, CliError> {
        let k = game.election().k();
        let choice = match requested {
            Some(c) => c,
            None if k == 1 => EngineChoice::Flow,
            None if k == 2 && two_approval::validate_minimal(game).is_ok() => EngineChoice::Flow,
            None => EngineChoice::Oracle,
        };
        Ok(match choice {
            EngineChoice::Flow if k == 1 => Analyzer::Flow(plurality::analyzer(game)?),
            EngineChoice::Flow if k == 2 => Analyzer::Flow(two_approval::analyzer(game)?),
            EngineChoice::Flow => {
                return Err(CliError::Usage(format!(
                    "the flow engine handles k = 1 and minimal k = 2 games only; this game has k = {k}"
                )))
            }
            EngineChoice::Oracle => Analyzer::Oracle(Oracle::new(game, budget)?),
        })
    }

    fn name(&self) -> &'static str {
        match self {
            Analyzer::Flow(_) => "flow",
            Analyzer::Oracle(_) => "oracle",
        }
    }

    fn weakly_dominates(&self, u: &BallotClass, v: &BallotClass) -> kapproval::Result<bool> {
        match self {
            Analyzer::Flow(a) => a.weakly_dominates_class(u, v),
            Analyzer::Oracle(a) => a.weakly_dominates_class(u, v),
        }
    }

    fn strictly_better_witness(&self, u: &BallotClass, v: &BallotClass) -> kapproval::Result<Option<Witness>> {
        match self {
            Analyzer::Flow(a) => a.strictly_better_witness_class(u, v),
            Analyzer::Oracle(a) => a.strictly_better_witness_class(u, v),
        }
    }

    fn is_level2(&self, v: &BallotClass) -> kapproval::Result<bool> {
        match self {
            Analyzer::Flow(a) => a.is_level2_class(v),
            Analyzer::Oracle(a) => a.is_level2_class(v),
        }
    }

    fn is_improving(&self, v: &BallotClass) -> kapproval::Result<bool> {
        match self {
            Analyzer::Flow(a) => a.is_improving_class(v),
            Analyzer::Oracle(a) => a.is_improving_class(v),
        }
    }

    fn enumerate_level2(&self) -> kapproval::Result<BTreeSet<BallotClass>> {
        match self {
            Analyzer::Flow(a) => a.enumerate_level2(),
            Analyzer::Oracle(a) => a.enumerate_level2(),
        }
    }

    fn enumerate_improving(&self) -> kapproval::Result<BTreeSet<BallotClass>> {
        match self {
            Analyzer::Flow(a) => a.enumerate_improving(),
            Analyzer::Oracle(a) => a.enumerate_improving(),
        }
    }
}

/// A vote argument: a named ballot, a `top:{a,b}` class literal or a complete ranking.
fn resolve_vote(file: &ElectionFile, game: &GsGame, text: &str) -> Result<Ballot, CliError> {
    let e = game.election();
    let text = text.trim();
    if let Some(b) = file.named_ballot(text) {
        return b;
    }
    if let Some(inner) = text.strip_prefix("top:{").and_then(|s| s.strip_suffix('}')) {
        let mut members = BTreeSet::new();
        for tok in inner.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let c = e
                .candidate(tok)
                .ok_or_else(|| CliError::Usage(format!("unknown candidate '{tok}' in '{text}'")))?;
            if !members.insert(c) {
                return Err(CliError::Usage(format!("candidate '{tok}' repeated in '{text}'")));
            }
        }
        if members.len() != e.k() {
            return Err(CliError::Usage(format!(
                "class literal '{text}' has {} members, k = {}",
                members.len(),
                e.k()
            )));
        }
        return Ok(canonical_ballot(&BallotClass::new(members), game.focal_ballot()));
    }
    e.parse_ballot(text)
        .map_err(|err| CliError::Usage(format!("vote '{text}': {err}")))
}

fn names(e: &Election, set: impl IntoIterator<Item = CandidateId>) -> Vec<String> {
    set.into_iter().map(|c| e.name(c).to_string()).collect()
}

fn braces(items: &[String]) -> String {
    format!("{{{}}}", items.join(","))
}

fn class_list(e: &Election, classes: &BTreeSet<BallotClass>) -> Vec<String> {
    classes.iter().map(|c| e.format_class(c)).collect()
}

struct Report {
    text: String,
    json: Value,
}

fn render(report: Report, json: bool) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(&report.json).expect("serializable report");
        s.push('\n');
        s
    } else {
        report.text
    }
}

fn analyze(file: &ElectionFile) -> Result<Report, CliError> {
    let e = file.election()?;
    let w = e.winner();
    let scores = e.scores();
    let manipulators = manipulation::gs_manipulators(&e);
    let cs = manipulation::competitive_sets(&e);
    let p_star = manipulation::p_star(&e);
    let mut best = Vec::new();
    for i in 0..e.voter_count() {
        best.push((file.voter_name(i).to_string(), e.name(manipulation::best_feasible(&e, i)?).to_string()));
    }
    let manip_names: Vec<String> = manipulators.iter().map(|&i| file.voter_name(i).to_string()).collect();
    let s1 = names(&e, cs.s1.iter().copied());
    let s2 = names(&e, cs.s2.iter().copied());

    let mut text = String::new();
    text += &format!("winner: {}\n", e.name(w));
    text += &format!(
        "scores: {}\n",
        e.candidates().map(|c| format!("{}={}", e.name(c), scores[c.index()])).collect::<Vec<_>>().join(" ")
    );
    text += &format!("manipulators: {}\n", braces(&manip_names));
    text += &format!("s1: {}\n", braces(&s1));
    text += &format!("s2: {}\n", braces(&s2));
    text += &format!("p_star: {}\n", p_star.map_or("none", |p| e.name(p)));
    text += &format!(
        "best_feasible: {}\n",
        best.iter().map(|(v, c)| format!("{v}={c}")).collect::<Vec<_>>().join(" ")
    );

    let score_map: Map<String, Value> = e.candidates().map(|c| (e.name(c).to_string(), json!(scores[c.index()]))).collect();
    let best_map: Map<String, Value> = best.iter().map(|(v, c)| (v.clone(), json!(c))).collect();
    let json = json!({
        "winner": e.name(w),
        "scores": score_map,
        "manipulators": manip_names,
        "s1": s1,
        "s2": s2,
        "p_star": p_star.map(|p| e.name(p)),
        "best_feasible": best_map,
    });
    Ok(Report { text, json })
}

fn level1(file: &ElectionFile, voter: &str) -> Result<Report, CliError> {
    let e = file.election()?;
    let i = file
        .voter_index(voter)
        .ok_or_else(|| CliError::Usage(format!("unknown voter '{voter}'")))?;
    let r = manipulation::level1_strategies(&e, i)?;
    let feasible = names(&e, r.feasible.iter().copied());
    let all = class_list(&e, &r.strategies);
    let minimal = class_list(&e, &r.minimal_strategies);
    let text = format!(
        "voter: {voter}\nmanipulator: {}\nfeasible: {}\nbest_feasible: {}\nstrategies: {}\nminimal: {}\n",
        r.manipulator,
        braces(&feasible),
        e.name(r.best_feasible),
        all.join(" "),
        minimal.join(" "),
    );
    let json = json!({
        "voter": voter,
        "manipulator": r.manipulator,
        "feasible": feasible,
        "best_feasible": e.name(r.best_feasible),
        "strategies": all,
        "minimal": minimal,
    });
    Ok(Report { text, json })
}

fn witness_report(file: &ElectionFile, game: &GsGame, w: &Witness) -> (String, Value) {
    let e = game.election();
    let mut text = String::from("witness:\n");
    let mut profile = Map::new();
    for (slot, &voter) in game.opponents().iter().enumerate() {
        let ballot = e.format_ballot(game.chosen_ballot(&w.profile, slot));
        text += &format!("  {} = {ballot}\n", file.voter_name(voter));
        profile.insert(file.voter_name(voter).to_string(), json!(ballot));
    }
    text += &format!("  winner with u: {}\n  winner with v: {}\n", e.name(w.better), e.name(w.worse));
    let json = json!({
        "profile": profile,
        "winner_u": e.name(w.better),
        "winner_v": e.name(w.worse),
    });
    (text, json)
}

struct Session<'a> {
    cli: &'a Cli,
    file: ElectionFile,
    game: GsGame,
}

impl<'a> Session<'a> {
    fn open(cli: &'a Cli, path: &Path) -> Result<Self, CliError> {
        let file = load(path)?;
        let game = file.game()?;
        Ok(Session { cli, file, game })
    }

    fn budget(&self) -> Result<OracleBudget, CliError> {
        match self.cli.budget {
            None => Ok(OracleBudget::default()),
            Some(b) => Ok(OracleBudget::uniform(b as u128)?),
        }
    }

    fn analyzer(&self, engine: Option<EngineChoice>) -> Result<Analyzer<'_>, CliError> {
        Analyzer::select(&self.game, engine, self.budget()?)
    }

    fn class(&self, vote: &str) -> Result<BallotClass, CliError> {
        let b = resolve_vote(&self.file, &self.game, vote)?;
        Ok(self.game.election().class_of(&b))
    }

    fn dominates(&self, engine: Option<EngineChoice>, u: &str, v: &str) -> Result<Report, CliError> {
        let a = self.analyzer(engine)?;
        let (cu, cv) = (self.class(u)?, self.class(v)?);
        let e = self.game.election();
        let result = a.weakly_dominates(&cu, &cv)?;
        let mut text = format!("{result}\n");
        let mut json = json!({
            "command": "dominates",
            "engine": a.name(),
            "u": e.format_class(&cu),
            "v": e.format_class(&cv),
            "result": result,
        });
        if self.cli.witness && result {
            let w = a
                .strictly_better_witness(&cu, &cv)?
                .expect("weak dominance implies a strictly better counter-profile");
            let (t, j) = witness_report(&self.file, &self.game, &w);
            text += &t;
            json["witness"] = j;
        }
        Ok(Report { text, json })
    }

    fn level2(&self, engine: Option<EngineChoice>, vote: Option<&str>, improving: bool) -> Result<Report, CliError> {
        let a = self.analyzer(engine)?;
        let e = self.game.election();
        let command = if improving { "improving" } else { "level2" };
        match vote {
            Some(v) => {
                let c = self.class(v)?;
                let result = if improving { a.is_improving(&c)? } else { a.is_level2(&c)? };
                Ok(Report {
                    text: format!("{result}\n"),
                    json: json!({
                        "command": command,
                        "engine": a.name(),
                        "vote": e.format_class(&c),
                        "result": result,
                    }),
                })
            }
            None => {
                let set = if improving { a.enumerate_improving()? } else { a.enumerate_level2()? };
                let classes = class_list(e, &set);
                let text = classes.iter().map(|c| format!("{c}\n")).collect();
                Ok(Report {
                    text,
                    json: json!({
                        "command": command,
                        "engine": a.name(),
                        "classes": classes,
                    }),
                })
            }
        }
    }
}

/// The election file of the game built from an exact-cover instance.
pub fn x3c_election_file(out: &kapproval::ReductionOutput) -> ElectionFile {
    let game = &out.game;
    let e = game.election();
    let ranking = |b: &Ballot| names(e, b.ranking().iter().copied());
    let voter = |i: usize| out.roles.voter_names[i].clone();
    let strategies = game
        .opponents()
        .iter()
        .zip(game.strategy_sets())
        .filter(|(_, set)| set.len() > 1)
        .map(|(&i, set)| (voter(i), StrategySpec::Rankings(set[1..].iter().map(ranking).collect())))
        .collect();
    ElectionFile {
        candidates: e.names().to_vec(),
        tiebreak: names(e, e.tiebreak().order().iter().copied()),
        k: e.k(),
        voters: (0..e.voter_count()).map(|i| (voter(i), ranking(e.ballot(i)))).collect(),
        focal: Some(voter(game.focal())),
        policy: Some(PolicyKeyword::Truthful),
        strategies,
        ballots: vec![
            ("z0".into(), ranking(&out.z0)),
            ("z0p".into(), ranking(&out.z0_prime)),
            ("z0pp".into(), ranking(&out.z0_dprime)),
        ],
    }
}

fn gen_x3c(path: &Path, k: usize, padded: bool) -> Result<Report, CliError> {
    let inst = X3CInstance::parse(&read(path)?)?;
    let out = if padded {
        kapproval::x3c::build_game(&inst, k)?
    } else {
        kapproval::x3c::generate(&inst, k)?
    };
    let cover = match kapproval::x3c::solve_x3c(&out.instance) {
        Ok(true) => "yes",
        Ok(false) => "no",
        Err(_) => "unknown",
    };
    let file = x3c_election_file(&out);
    let body = file.serialize();
    let text = format!(
        "# game of an exact-cover instance: {} elements, {} sets after padding, k = {k}\n# exact cover: {cover}\n{body}",
        out.instance.ground_size(),
        out.instance.mu(),
    );
    let json = json!({
        "elements": out.instance.ground_size(),
        "sets": out.instance.mu(),
        "k": k,
        "exact_cover": cover,
        "file": body,
    });
    Ok(Report { text, json })
}

/// Runs one command and returns its standard output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let report = match &cli.command {
        Command::Analyze { file } => analyze(&load(file)?)?,
        Command::Level1 { file, voter } => level1(&load(file)?, voter)?,
        Command::Dominates { file, u, v } => Session::open(cli, file)?.dominates(cli.engine, u, v)?,
        Command::Level2 { file, vote } => Session::open(cli, file)?.level2(cli.engine, vote.as_deref(), false)?,
        Command::Improving { file, vote } => Session::open(cli, file)?.level2(cli.engine, vote.as_deref(), true)?,
        Command::Oracle { query } => {
            if cli.engine == Some(EngineChoice::Flow) {
                return Err(CliError::Usage("`oracle` queries always use the oracle engine".into()));
            }
            let oracle = Some(EngineChoice::Oracle);
            match query {
                OracleQuery::Dominates { file, u, v } => Session::open(cli, file)?.dominates(oracle, u, v)?,
                OracleQuery::Level2 { file, vote } => Session::open(cli, file)?.level2(oracle, vote.as_deref(), false)?,
                OracleQuery::Improving { file, vote } => {
                    Session::open(cli, file)?.level2(oracle, vote.as_deref(), true)?
                }
            }
        }
        Command::GenX3c { file, k, padded } => gen_x3c(file, *k, *padded)?,
    };
    Ok(render(report, cli.json))
}
