use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Generator, GeneratorStats, Move, Source, StepContext};
use crate::error::{invalid, Result};
use crate::lang::{LanguageCollection, UnusedCursor, UsedSet};
use crate::rng::{substream, SBG_CHOICES, SBG_DECISIONS};
use crate::schedule::{DeadlineFn, Staircase};

/// Candidate count `C(m)` per epoch.
#[derive(Debug, Clone, PartialEq)]
pub enum SpeculationBudget {
    Staircase(Staircase),
    Constant(u64),
    /// `values[m-1]`; epochs past the table reuse the last value.
    Table(Vec<u64>),
}

impl SpeculationBudget {
    pub fn eval(&self, m: u64) -> u64 {
        match self {
            SpeculationBudget::Staircase(s) => s.eval(m),
            SpeculationBudget::Constant(c) => *c,
            SpeculationBudget::Table(v) => v[((m.max(1) - 1) as usize).min(v.len() - 1)],
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            SpeculationBudget::Staircase(_) => true,
            SpeculationBudget::Constant(c) => *c >= 1,
            SpeculationBudget::Table(v) => !v.is_empty() && v.iter().all(|&c| c >= 1),
        };
        if ok {
            Ok(())
        } else {
            Err(invalid("speculation budget must be >= 1 everywhere"))
        }
    }
}

/// `δ_m = min{1, 10·C(m) / (D(m) - D(m-1))}`.
pub fn speculation_probability(d: &DeadlineFn, c: u64, m: u64) -> f64 {
    let width = d.eval(m) - d.eval(m - 1);
    if width == 0 {
        return 1.0;
    }
    (10.0 * c as f64 / width as f64).min(1.0)
}

/// Wraps a blackbox generator and, with epoch-dependent probability,
/// replaces its output by the next unused member of a random candidate
/// among the first `C(m)` languages.
#[derive(Debug)]
pub struct Sbg {
    collection: Arc<LanguageCollection>,
    deadline: DeadlineFn,
    budget: SpeculationBudget,
    blackbox: Box<dyn Generator>,
    blackbox_used: UsedSet,
    decisions: ChaCha8Rng,
    choices: ChaCha8Rng,
    cursors: Vec<UnusedCursor>,
    epoch: u64,
    speculations: u64,
    substitutions: u64,
}

impl Sbg {
    pub fn new(
        collection: Arc<LanguageCollection>,
        deadline: DeadlineFn,
        budget: SpeculationBudget,
        blackbox: Box<dyn Generator>,
        seed: u64,
    ) -> Result<Self> {
        budget.validate()?;
        let cursors = vec![UnusedCursor::new(); collection.len()];
        Ok(Self {
            collection,
            deadline,
            budget,
            blackbox,
            blackbox_used: UsedSet::new(),
            decisions: substream(seed, SBG_DECISIONS),
            choices: substream(seed, SBG_CHOICES),
            cursors,
            epoch: 0,
            speculations: 0,
            substitutions: 0,
        })
    }

    /// Epoch `m(t) = min{m : t <= D(m)}` of the last step.
    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn budget(&self) -> &SpeculationBudget {
        &self.budget
    }

    fn next_from(&mut self, j: usize, used: &UsedSet) -> Result<crate::lang::StringId> {
        let lang = self.collection.language(j)?.clone();
        self.cursors[j - 1].next_unused(lang.as_ref(), used)
    }
}

impl Generator for Sbg {
    fn step(&mut self, ctx: &StepContext<'_>) -> Result<Move> {
        while self.deadline.eval(self.epoch) < ctx.t {
            self.epoch += 1;
        }
        let m = self.epoch;
        let c_m = self.budget.eval(m);
        let delta = speculation_probability(&self.deadline, c_m, m);

        self.blackbox_used.insert(ctx.observation);
        let proposal = self.blackbox.step(&StepContext { t: ctx.t, observation: ctx.observation, used: &self.blackbox_used })?;
        self.blackbox_used.insert(proposal.output);

        let speculate = self.decisions.random_bool(delta);
        let choice = self.choices.random_range(1..=c_m);
        if speculate {
            self.speculations += 1;
            let j = (choice as usize).min(self.collection.len());
            let output = self.next_from(j, ctx.used)?;
            return Ok(Move { output, source: Source::Speculate, flag: false });
        }
        if !ctx.used.contains(proposal.output) {
            return Ok(Move { output: proposal.output, source: Source::Blackbox, flag: proposal.flag });
        }
        self.substitutions += 1;
        let j = self.blackbox.current_guess().unwrap_or(1);
        let output = self.next_from(j, ctx.used)?;
        Ok(Move { output, source: Source::Substituted, flag: true })
    }

    fn current_guess(&self) -> Option<usize> {
        self.blackbox.current_guess()
    }

    fn stats(&self) -> GeneratorStats {
        GeneratorStats {
            speculations: self.speculations,
            substitutions: self.substitutions,
            fallbacks: self.blackbox.stats().fallbacks,
            stage: self.epoch,
        }
    }

    fn name(&self) -> &'static str {
        "sbg"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{Greedy, Tolerance};
    use crate::lang::{make_block_partition_chain_with, BlockGrowth, StringId, DEFAULT_BOUND};

    fn sbg(budget: SpeculationBudget, d: DeadlineFn, seed: u64) -> Sbg {
        let chain = Arc::new(make_block_partition_chain_with(BlockGrowth::Linear, 4, DEFAULT_BOUND).unwrap());
        let bb = Box::new(Greedy::new(chain.clone(), Tolerance::Exact));
        Sbg::new(chain, d, budget, bb, seed).unwrap()
    }

    fn play(g: &mut Sbg, target: &dyn crate::lang::Language, horizon: u64) -> Vec<Move> {
        let mut used = UsedSet::new();
        let mut moves = Vec::new();
        for t in 1..=horizon {
            let x = target.nth(t).unwrap();
            used.insert(x);
            let mv = g.step(&StepContext { t, observation: x, used: &used }).unwrap();
            assert!(used.insert(mv.output), "repeat at t={t}");
            moves.push(mv);
        }
        moves
    }

    #[test]
    fn delta_examples() {
        let cube = DeadlineFn::power(3, 1).unwrap();
        assert!((speculation_probability(&cube, 10, 10) - 100.0 / 271.0).abs() < 1e-15);
        assert_eq!(speculation_probability(&DeadlineFn::Identity, 1, 1), 1.0);
        assert_eq!(speculation_probability(&DeadlineFn::table(vec![1, 1]).unwrap(), 1, 2), 1.0);
    }

    #[test]
    fn epochs_change_after_deadlines() {
        let d = DeadlineFn::power(2, 1).unwrap();
        let mut g = sbg(SpeculationBudget::Constant(1), d.clone(), 3);
        let chain = make_block_partition_chain_with(BlockGrowth::Linear, 4, DEFAULT_BOUND).unwrap();
        let target = chain.language(2).unwrap().clone();
        let mut used = UsedSet::new();
        for t in 1..=50u64 {
            let x = target.nth(t).unwrap();
            used.insert(x);
            let mv = g.step(&StepContext { t, observation: x, used: &used }).unwrap();
            used.insert(mv.output);
            assert_eq!(g.epoch(), d.inverse(t));
            if [2, 5, 10, 17, 26, 37, 50].contains(&t) {
                assert_eq!(g.epoch(), (t as f64).sqrt() as u64 + 1);
            }
        }
    }

    #[test]
    fn seeded_runs_are_identical() {
        let chain = make_block_partition_chain_with(BlockGrowth::Linear, 4, DEFAULT_BOUND).unwrap();
        let target = chain.language(3).unwrap().clone();
        let d = DeadlineFn::power(3, 2).unwrap();
        let a = play(&mut sbg(SpeculationBudget::Constant(3), d.clone(), 11), target.as_ref(), 2000);
        let b = play(&mut sbg(SpeculationBudget::Constant(3), d.clone(), 11), target.as_ref(), 2000);
        let c = play(&mut sbg(SpeculationBudget::Constant(3), d, 12), target.as_ref(), 2000);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn speculation_only_hallucinates_through_wrong_candidates() {
        let chain = make_block_partition_chain_with(BlockGrowth::Linear, 4, DEFAULT_BOUND).unwrap();
        let target = chain.language(2).unwrap().clone();
        let mut g = sbg(SpeculationBudget::Constant(2), DeadlineFn::power(3, 2).unwrap(), 5);
        let moves = play(&mut g, target.as_ref(), 3000);
        let halluc = moves.iter().filter(|m| !target.contains(m.output)).count() as u64;
        let bb_halluc = moves.iter().filter(|m| m.source != Source::Speculate && !target.contains(m.output)).count() as u64;
        assert!(halluc <= bb_halluc + g.stats().speculations);
        // both candidates are subsets of the target
        assert!(moves.iter().filter(|m| m.source == Source::Speculate).all(|m| target.contains(m.output)));
        assert_eq!(g.stats().speculations, moves.iter().filter(|m| m.source == Source::Speculate).count() as u64);
        assert!(moves.iter().all(|m| m.output != StringId(0)));
    }
}
