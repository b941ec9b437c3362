use std::sync::Arc;

use super::{CriticalGuesser, Generator, GeneratorStats, Move, Source, StepContext, Tolerance};
use crate::error::Result;
use crate::lang::{LanguageCollection, UnusedCursor};

/// Outputs the smallest unused member of the current guess.
#[derive(Debug, Clone)]
pub struct Greedy {
    guesser: CriticalGuesser,
    cursors: Vec<UnusedCursor>,
    guess: Option<usize>,
    fallbacks: u64,
}

impl Greedy {
    pub fn new(collection: Arc<LanguageCollection>, tolerance: Tolerance) -> Self {
        let cursors = vec![UnusedCursor::new(); collection.len()];
        Self { guesser: CriticalGuesser::new(collection, tolerance), cursors, guess: None, fallbacks: 0 }
    }
}

impl Generator for Greedy {
    fn step(&mut self, ctx: &StepContext<'_>) -> Result<Move> {
        self.guesser.observe(ctx.observation);
        let g = self.guesser.guess(ctx.t);
        self.guess = Some(g.index);
        self.fallbacks += u64::from(g.fallback);
        let lang = self.guesser.collection().language(g.index)?.clone();
        let output = self.cursors[g.index - 1].next_unused(lang.as_ref(), ctx.used)?;
        Ok(Move { output, source: Source::Guesser, flag: g.fallback })
    }

    fn current_guess(&self) -> Option<usize> {
        self.guess
    }

    fn stats(&self) -> GeneratorStats {
        GeneratorStats { fallbacks: self.fallbacks, ..GeneratorStats::default() }
    }

    fn name(&self) -> &'static str {
        "greedy"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{make_block_partition_chain, make_block_partition_chain_with, BlockGrowth, StringId, UsedSet, DEFAULT_BOUND};

    #[test]
    fn first_move_is_first_member_of_first_level() {
        let chain = Arc::new(make_block_partition_chain(3).unwrap());
        let mut g = Greedy::new(chain.clone(), Tolerance::Exact);
        let mut used = UsedSet::new();
        used.insert(StringId(1));
        let m = g.step(&StepContext { t: 1, observation: StringId(1), used: &used }).unwrap();
        // L^1 = {1,2,3,4,8,…}; 1 was observed
        assert_eq!(m.output, StringId(2));
        assert_eq!(m.source, Source::Guesser);
        assert!(!m.flag);
        assert_eq!(g.current_guess(), Some(1));
    }

    #[test]
    fn never_repeats_and_stays_consistent_on_target() {
        let chain = Arc::new(make_block_partition_chain_with(BlockGrowth::Linear, 3, DEFAULT_BOUND).unwrap());
        let target = chain.language(1).unwrap().clone();
        let mut g = Greedy::new(chain, Tolerance::Exact);
        let mut used = UsedSet::new();
        for t in 1..=100 {
            let x = target.nth(t).unwrap();
            used.insert(x);
            let m = g.step(&StepContext { t, observation: x, used: &used }).unwrap();
            assert!(used.insert(m.output));
            assert!(target.contains(m.output));
        }
    }
}
