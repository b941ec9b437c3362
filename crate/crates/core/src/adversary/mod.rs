//! Adversaries: total, aggressive, partial and contaminated enumerations,
//! and the staged chain adversary behind the impossibility results.

mod enumerators;
mod staged;

use std::fmt;

use crate::error::Result;
use crate::lang::{StringId, UsedSet};

pub use enumerators::{Aggressive, Canonical, Contaminated, Partial};
pub use staged::{ProbeFactory, StageLog, StageRecord, StagedChain};

/// A per-step emitter of observations.
pub trait Adversary: Send + fmt::Debug {
    /// Emits `x_t`. `used` holds `x_1..x_{t-1}` and `o_1..o_{t-1}`.
    fn emit(&mut self, t: u64, used: &UsedSet) -> Result<StringId>;

    /// Stage switches, for adversaries that work in stages.
    fn stage_log(&self) -> Option<StageLog> {
        None
    }

    fn name(&self) -> &'static str;
}
