//! Strategic voting under k-approval with a fixed tie-breaking order.
//!
//! * [`election`]: ballots, scores, winners.
//! * [`manipulation`]: GS-manipulators, feasible sets, level-1 strategies.
//! * [`game`]: GS-games between a focal voter and the manipulators.
//! * [`dominance`]: polynomial dominance tests for Plurality and minimal 2-approval.
//! * [`oracle`]: exhaustive reference for any `k`.
//! * [`x3c`]: exact-cover instances and the games built from them.

pub mod dominance;
pub mod election;
pub mod error;
pub mod fixtures;
pub mod flow;
pub mod game;
pub mod manipulation;
pub mod oracle;
pub mod x3c;

pub use dominance::{FlowDominance, Level, ScoreQuery, Witness};
pub use election::{Ballot, BallotClass, CandidateId, Election, TieBreakOrder};
pub use error::{Error, Result};
pub use game::{CounterProfile, GsGame, StrategyPolicy};
pub use manipulation::{CompetitiveSets, Level1Report, ManipulationKind};
pub use oracle::{Oracle, OracleBudget};
pub use x3c::{ReductionOutput, X3CInstance};

/// Flow network with 64-bit capacities, the width used by the dominance engines.
pub type FlowNetworkI64 = flow::FlowNetwork<i64>;
pub type FlowAssignmentI64 = flow::FlowAssignment<i64>;
pub type FlowNetworkI32 = flow::FlowNetwork<i32>;
pub type FlowAssignmentI32 = flow::FlowAssignment<i32>;
