use thiserror::Error;

/// Errors reported by the analysis routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The election itself is malformed (bad ranking, bad `k`, empty profile, ...).
    #[error("invalid election: {0}")]
    InvalidElection(String),

    /// An argument violates the operation's preconditions.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// `classify` was handed a ballot that does not improve the outcome for the voter.
    #[error("ballot is not a manipulative vote of voter {voter}")]
    NotManipulative { voter: usize },

    /// A flow engine was asked to analyse a game under the wrong rule.
    #[error("rule mismatch: engine requires k = {expected}, election has k = {found}")]
    RuleMismatch { expected: usize, found: usize },

    /// A user supplied strategy is neither truthful nor a level-1 strategy.
    #[error("voter {voter}: {reason}")]
    InvalidStrategy { voter: usize, reason: String },

    /// A 2-approval game contains a manipulation the flow encoding cannot represent.
    #[error("voter {voter} has a non-minimal strategy; the 2-approval flow engine requires minimal manipulations")]
    NonMinimal { voter: usize },

    /// An exhaustive search would exceed its configured budget.
    #[error("search space of {size} {what} exceeds the budget of {limit}")]
    Budget {
        what: &'static str,
        size: u128,
        limit: u128,
    },

    /// Malformed exact-cover input or a reduction invariant that failed to hold.
    #[error("x3c: {0}")]
    X3c(String),
}

pub type Result<T> = std::result::Result<T, Error>;
