use std::sync::Arc;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::lang::{LanguageCollection, StringId};

/// How many observed non-members a language may have and still count as
/// consistent.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tolerance {
    /// Every observation must be a member.
    #[default]
    Exact,
    /// Up to `⌊log2(t + 1)⌋` non-members by time `t`.
    Log2,
}

impl Tolerance {
    pub fn allowed(self, t: u64) -> u64 {
        match self {
            Tolerance::Exact => 0,
            Tolerance::Log2 => u64::from((t + 1).ilog2()),
        }
    }
}

/// A guess and whether it is a fallback because nothing was consistent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Guess {
    pub index: usize,
    pub fallback: bool,
}

/// Minimal consistent language among the first `t` collection indices,
/// under the collection's subset oracle.
#[derive(Debug, Clone)]
pub struct CriticalGuesser {
    collection: Arc<LanguageCollection>,
    tolerance: Tolerance,
    seen: FxHashSet<StringId>,
    violations: Vec<u64>,
}

impl CriticalGuesser {
    pub fn new(collection: Arc<LanguageCollection>, tolerance: Tolerance) -> Self {
        let n = collection.len();
        Self { collection, tolerance, seen: FxHashSet::default(), violations: vec![0; n] }
    }

    pub fn collection(&self) -> &Arc<LanguageCollection> {
        &self.collection
    }

    /// Records an observation; repeats are counted once.
    pub fn observe(&mut self, x: StringId) {
        if !self.seen.insert(x) {
            return;
        }
        for (j, lang) in self.collection.iter() {
            if !lang.contains(x) {
                self.violations[j - 1] += 1;
            }
        }
    }

    /// Distinct observed strings outside language `j`.
    pub fn violations(&self, j: usize) -> u64 {
        self.violations[j - 1]
    }

    pub fn guess(&self, t: u64) -> Guess {
        let allowed = self.tolerance.allowed(t);
        let limit = (t.min(self.collection.len() as u64)) as usize;
        let mut best: Option<usize> = None;
        for j in 1..=limit {
            if self.violations[j - 1] > allowed {
                continue;
            }
            best = match best {
                None => Some(j),
                Some(b) if self.strictly_below(j, b) => Some(j),
                keep => keep,
            };
        }
        match best {
            Some(index) => Guess { index, fallback: false },
            None => Guess { index: 1, fallback: true },
        }
    }

    fn strictly_below(&self, a: usize, b: usize) -> bool {
        self.collection.is_subset(a, b) == Some(true) && self.collection.is_subset(b, a) != Some(true)
    }
}
