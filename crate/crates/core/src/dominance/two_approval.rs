//! Dominance, level-2 and improving strategies under 2-approval for games in
//! which every manipulator only uses minimal manipulations.
//!
//! A demoter always approves its top choice `p*` and picks one more
//! candidate; a promoter approves two of `{a, a', p}`. Both shapes are
//! "fixed part plus free choice", which the shared flow encoding captures.

use std::collections::BTreeSet;

use super::{FlowDominance, ScoreQuery, Witness};
use crate::election::{Ballot, BallotClass};
use crate::error::{Error, Result};
use crate::game::GsGame;
use crate::manipulation;

/// Rejects games whose strategy sets contain a non-minimal manipulation.
pub fn validate_minimal(game: &GsGame) -> Result<()> {
    let e = game.election();
    if e.k() != 2 {
        return Err(Error::RuleMismatch { expected: 2, found: e.k() });
    }
    for (&voter, classes) in game.opponents().iter().zip(game.strategy_classes()) {
        for class in classes.iter().skip(1) {
            if !manipulation::is_minimal_level1_class(e, voter, class)? {
                return Err(Error::NonMinimal { voter });
            }
        }
    }
    Ok(())
}

fn engine(game: &GsGame) -> Result<FlowDominance<'_>> {
    validate_minimal(game)?;
    FlowDominance::new(game)
}

/// Shared engine for several queries on one game.
pub fn analyzer(game: &GsGame) -> Result<FlowDominance<'_>> {
    engine(game)
}

pub fn alg2(game: &GsGame, q: &ScoreQuery) -> Result<bool> {
    engine(game)?.alg(q)
}

pub fn exists_strictly_better_2(game: &GsGame, u: &Ballot, v: &Ballot) -> Result<bool> {
    engine(game)?.exists_strictly_better(u, v)
}

pub fn strictly_better_witness_2(game: &GsGame, u: &Ballot, v: &Ballot) -> Result<Option<Witness>> {
    engine(game)?.strictly_better_witness(u, v)
}

pub fn weakly_dominates_2(game: &GsGame, u: &Ballot, v: &Ballot) -> Result<bool> {
    engine(game)?.weakly_dominates(u, v)
}

pub fn is_level2_2(game: &GsGame, v: &Ballot) -> Result<bool> {
    engine(game)?.is_level2(v)
}

pub fn is_improving_2(game: &GsGame, v: &Ballot) -> Result<bool> {
    engine(game)?.is_improving(v)
}

pub fn enumerate_level2_2(game: &GsGame) -> Result<BTreeSet<BallotClass>> {
    engine(game)?.enumerate_level2()
}

pub fn enumerate_improving_2(game: &GsGame) -> Result<BTreeSet<BallotClass>> {
    engine(game)?.enumerate_improving()
}
