//! Deadline functions, hallucination-rate bounds, feasibility diagnostics
//! and the constructions that derive one profile from another.

mod construct;
mod deadline;
mod profile;
mod rate;

pub use construct::{
    build_prefix_deadline, build_prefix_hallucination, choose_speculation_budget, diagonal_dominant,
    slow_divergent_minorant, Dominant, PrefixDeadline, PrefixHallucination, Staircase, PREFIX_FAMILY_SIZE,
};
pub use deadline::DeadlineFn;
pub use profile::{
    check_feasible_profile, CheckEntry, CheckStatus, FeasibilityReport, Profile, BUDGET_TREND, D_CONVEX,
    D_MONOTONE, D_SUPERLINEAR, H_MONOTONE, H_VANISHING,
};
pub use rate::RateFn;
