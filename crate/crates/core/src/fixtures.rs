//! Small hand-checked elections that exhibit the characteristic strategic
//! situations. Used by the test suites and handy for experimentation.
//!
//! Voter indices are 0-based; voter 0 is the natural focal voter in each.

use crate::election::{CandidateId, Election};

/// 2-approval, tie-break `a > b > c`. Voters 0 and 1 can each make `b` win by
/// voting `b a c`, but if both do, `a` wins.
pub fn two_manipulator_risk() -> Election {
    Election::from_strs(
        &["a", "b", "c"],
        2,
        "a b c",
        &["b c a", "b c a", "a c b", "c b a"],
    )
    .expect("valid fixture")
}

/// Plurality, tie-break `a > b > c > d`; voters 1..=3 are manipulators in
/// favour of `d`, `b` and `c` respectively. Every class not topped by `d` is
/// level-2 for voter 0.
pub fn three_level2_plurality() -> Election {
    Election::from_strs(
        &["a", "b", "c", "d"],
        1,
        "a b c d",
        &["a b c d", "b d a c", "c b a d", "d c a b"],
    )
    .expect("valid fixture")
}

/// Plurality, tie-break `w > d > c > b > a`. Voter 0 has two improving
/// strategies (`b` first, `d` first) that do not dominate each other.
pub fn incomparable_improving() -> Election {
    Election::from_strs(
        &["a", "b", "c", "d", "w"],
        1,
        "w d c b a",
        &["a b d w c", "b c d w a", "c d b w a", "d w c a b", "w a b c d"],
    )
    .expect("valid fixture")
}

/// Plurality, tie-break `a > b > c`. Only voter 5 can manipulate (towards `b`);
/// voter 0 counters by voting `a c b`, which weakly dominates sincerity.
pub fn counter_manipulation() -> Election {
    Election::from_strs(
        &["a", "b", "c"],
        1,
        "a b c",
        &["c a b", "a b c", "a b c", "b a c", "b a c", "c b a"],
    )
    .expect("valid fixture")
}

/// 2-approval over `a b c d u1..u6`, tie-break in that order. All of `a..d`
/// score 2 and each `u_i` scores 1. With voters 3 and 4 restricted to the
/// single swaps returned by [`dominant_double_swap_strategies`], the focal
/// ballot approving `{b, c}` weakly dominates every other class.
pub fn dominant_double_swap() -> Election {
    Election::from_strs(
        &["a", "b", "c", "d", "u1", "u2", "u3", "u4", "u5", "u6"],
        2,
        "a b c d u1 u2 u3 u4 u5 u6",
        &[
            "u5 u6 b c d a u1 u2 u3 u4",
            "a d b c u1 u2 u3 u4 u5 u6",
            "a d b c u1 u2 u3 u4 u5 u6",
            "b u1 c a d u2 u3 u4 u5 u6",
            "b u2 d a c u1 u3 u4 u5 u6",
            "c u3 a b d u1 u2 u4 u5 u6",
            "c u4 a b d u1 u2 u3 u5 u6",
        ],
    )
    .expect("valid fixture")
}

/// The explicit strategy sets for [`dominant_double_swap`]: voter 3 may swap
/// `b` for `c`, voter 4 may swap `b` for `d`.
pub fn dominant_double_swap_strategies() -> Vec<(usize, Vec<crate::election::Ballot>)> {
    let e = dominant_double_swap();
    let id = |n: &str| -> CandidateId { e.candidate(n).expect("fixture name") };
    let v3 = e.ballot(3).clone();
    let v4 = e.ballot(4).clone();
    let v3m = v3.swap(&[id("b")], &[id("c")]).expect("valid swap");
    let v4m = v4.swap(&[id("b")], &[id("d")]).expect("valid swap");
    vec![(3, vec![v3, v3m]), (4, vec![v4, v4m])]
}
