//! Dominance, level-2 and improving strategies under Plurality.

use std::collections::BTreeSet;

use super::{FlowDominance, ScoreQuery, Witness};
use crate::election::{Ballot, BallotClass};
use crate::error::{Error, Result};
use crate::game::GsGame;

fn engine(game: &GsGame) -> Result<FlowDominance<'_>> {
    let k = game.election().k();
    if k != 1 {
        return Err(Error::RuleMismatch { expected: 1, found: k });
    }
    FlowDominance::new(game)
}

/// Shared engine for several queries on one game.
pub fn analyzer(game: &GsGame) -> Result<FlowDominance<'_>> {
    engine(game)
}

pub fn alg(game: &GsGame, q: &ScoreQuery) -> Result<bool> {
    engine(game)?.alg(q)
}

/// Is there a counter-profile where `u` elects someone the focal voter prefers
/// to the winner under `v`? Errors on equivalent ballots.
pub fn exists_strictly_better(game: &GsGame, u: &Ballot, v: &Ballot) -> Result<bool> {
    engine(game)?.exists_strictly_better(u, v)
}

pub fn strictly_better_witness(game: &GsGame, u: &Ballot, v: &Ballot) -> Result<Option<Witness>> {
    engine(game)?.strictly_better_witness(u, v)
}

pub fn weakly_dominates(game: &GsGame, u: &Ballot, v: &Ballot) -> Result<bool> {
    engine(game)?.weakly_dominates(u, v)
}

pub fn is_level2(game: &GsGame, v: &Ballot) -> Result<bool> {
    engine(game)?.is_level2(v)
}

pub fn is_improving(game: &GsGame, v: &Ballot) -> Result<bool> {
    engine(game)?.is_improving(v)
}

pub fn enumerate_level2(game: &GsGame) -> Result<BTreeSet<BallotClass>> {
    engine(game)?.enumerate_level2()
}

pub fn enumerate_improving(game: &GsGame) -> Result<BTreeSet<BallotClass>> {
    engine(game)?.enumerate_improving()
}
