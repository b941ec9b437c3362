//! Generators: the consistent guesser, the greedy blackbox, speculative
//! budgeted generation (SBG) and generation via consistent guessing (GCG).

mod gcg;
mod greedy;
mod guesser;
mod sbg;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lang::{StringId, UsedSet};

pub use gcg::{Gcg, StageIncrement};
pub use greedy::Greedy;
pub use guesser::{CriticalGuesser, Guess, Tolerance};
pub use sbg::{speculation_probability, Sbg, SpeculationBudget};

/// Which branch of a generator produced an output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Blackbox,
    Speculate,
    Guesser,
    Substituted,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Blackbox => "blackbox",
            Source::Speculate => "speculate",
            Source::Guesser => "guesser",
            Source::Substituted => "substituted",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "blackbox" => Source::Blackbox,
            "speculate" => Source::Speculate,
            "guesser" => Source::Guesser,
            "substituted" => Source::Substituted,
            other => return Err(format!("unknown source {other:?}")),
        })
    }
}

/// What a generator sees at step `t`.
///
/// `used` already holds `x_1..x_t` and `o_1..o_{t-1}`.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    pub t: u64,
    pub observation: StringId,
    pub used: &'a UsedSet,
}

/// One generator output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub output: StringId,
    pub source: Source,
    /// Set when the output came from a fallback path: no consistent guess,
    /// no on-time element, or a substituted collision.
    pub flag: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct GeneratorStats {
    pub speculations: u64,
    pub substitutions: u64,
    pub fallbacks: u64,
    /// SBG epoch or GCG stage index; zero for stageless generators.
    pub stage: u64,
}

/// An online generator playing one game.
pub trait Generator: Send + fmt::Debug {
    /// Produces `o_t`, which must not be in `ctx.used`.
    fn step(&mut self, ctx: &StepContext<'_>) -> Result<Move>;

    /// Collection index of the current guess, if the generator keeps one.
    fn current_guess(&self) -> Option<usize>;

    fn stats(&self) -> GeneratorStats;

    fn name(&self) -> &'static str;
}
