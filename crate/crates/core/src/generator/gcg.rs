use std::sync::Arc;

use rustc_hash::FxHashMap;
use serde::Serialize;

use super::{CriticalGuesser, Generator, GeneratorStats, Move, Source, StepContext, Tolerance};
use crate::error::Result;
use crate::lang::{Language, LanguageCollection, StringId, UnusedCursor, UsedSet};
use crate::metrics::Density;
use crate::schedule::DeadlineFn;

/// Stage `m` was left at time `t` with this density against `g_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct StageIncrement {
    pub t: u64,
    pub from: u64,
    pub candidate: Option<usize>,
    pub density: Option<Density>,
}

/// `α_m = 1/2 - 2^{-m}` as an exact comparison `hits/of >= α_m`.
fn meets_alpha(hits: u64, of: u64, m: u64) -> bool {
    if m == 0 {
        return true;
    }
    if m >= 64 {
        return 2 * u128::from(hits) >= u128::from(of);
    }
    // hits/of >= (2^{m-1} - 1) / 2^m
    u128::from(hits) << m >= (u128::from(of)) * ((1u128 << (m - 1)) - 1)
}

/// Generation via consistent guessing: builds the list `G` of strictly
/// growing guesses and generates on time from `g_m`, advancing `m` once the
/// timely element-wise density against `g_m` reaches `α_m`.
#[derive(Debug)]
pub struct Gcg {
    deadline: DeadlineFn,
    guesser: CriticalGuesser,
    previous: usize,
    candidates: Vec<usize>,
    stage: u64,
    cursors: Vec<UnusedCursor>,
    fallback_cursors: Vec<UnusedCursor>,
    generated: FxHashMap<StringId, u64>,
    tracked: Option<usize>,
    hits: u64,
    guess: Option<usize>,
    fallbacks: u64,
    increments: Vec<StageIncrement>,
}

impl Gcg {
    pub fn new(collection: Arc<LanguageCollection>, deadline: DeadlineFn, tolerance: Tolerance) -> Self {
        let n = collection.len();
        Self {
            deadline,
            guesser: CriticalGuesser::new(collection, tolerance),
            previous: 1,
            candidates: Vec::new(),
            stage: 0,
            cursors: vec![UnusedCursor::new(); n],
            fallback_cursors: vec![UnusedCursor::new(); n],
            generated: FxHashMap::default(),
            tracked: None,
            hits: 0,
            guess: None,
            fallbacks: 0,
            increments: Vec::new(),
        }
    }

    /// The candidate list `G`.
    pub fn candidates(&self) -> &[usize] {
        &self.candidates
    }

    pub fn stage(&self) -> u64 {
        self.stage
    }

    pub fn increments(&self) -> &[StageIncrement] {
        &self.increments
    }

    fn lang(&self, j: usize) -> Result<Arc<dyn Language>> {
        Ok(self.guesser.collection().language(j)?.clone())
    }

    /// Recounts `Σ_{j<=t} 1{gen_time(nth(L^g, j)) <= D(j)}` from scratch.
    fn recount(&mut self, g: usize, t: u64) -> Result<()> {
        let lang = self.lang(g)?;
        let mut hits = 0;
        let mut x = StringId(0);
        for j in 1..=t {
            x = lang.first_at_or_after(x)?;
            if self.generated.get(&x).is_some_and(|&s| s <= self.deadline.eval(j)) {
                hits += 1;
            }
            x = StringId(x.0 + 1);
        }
        self.tracked = Some(g);
        self.hits = hits;
        Ok(())
    }

    /// Brings the density count against `g` up to time `t` after output `o`.
    fn track(&mut self, g: usize, t: u64, o: StringId) -> Result<()> {
        if self.tracked != Some(g) {
            return self.recount(g, t);
        }
        let lang = self.lang(g)?;
        let newest = lang.nth(t)?;
        if newest != o && self.generated.get(&newest).is_some_and(|&s| s <= self.deadline.eval(t)) {
            self.hits += 1;
        }
        if lang.contains(o) {
            let j = lang.rank_leq(o);
            if j <= t && t <= self.deadline.eval(j) {
                self.hits += 1;
            }
        }
        Ok(())
    }

    fn emit(&mut self, j: usize, t: u64, used: &UsedSet) -> Result<(StringId, bool)> {
        let lang = self.lang(j)?;
        match self.cursors[j - 1].on_time_unused(lang.as_ref(), used, t, &self.deadline)? {
            Some(x) => Ok((x, false)),
            None => {
                self.fallbacks += 1;
                Ok((self.fallback_cursors[j - 1].next_unused(lang.as_ref(), used)?, true))
            }
        }
    }
}

impl Generator for Gcg {
    fn step(&mut self, ctx: &StepContext<'_>) -> Result<Move> {
        let t = ctx.t;
        self.guesser.observe(ctx.observation);
        let g = self.guesser.guess(t);
        self.guess = Some(g.index);
        let cur = g.index;
        let grows = cur != self.previous
            && self.guesser.collection().is_subset(self.previous, cur) == Some(true)
            && self.guesser.violations(self.previous) > self.guesser.violations(cur);
        if grows {
            self.candidates.push(cur);
        }
        self.previous = cur;

        let source_lang = if self.stage == 0 { cur } else { self.candidates[(self.stage - 1) as usize] };
        let (output, late) = self.emit(source_lang, t, ctx.used)?;
        self.generated.insert(output, t);

        let m = self.stage;
        let ready = self.candidates.len() as u64 > m;
        if m == 0 {
            if ready {
                self.increments.push(StageIncrement { t, from: 0, candidate: None, density: None });
                self.stage = 1;
            }
        } else {
            let gm = self.candidates[(m - 1) as usize];
            self.track(gm, t, output)?;
            if ready && meets_alpha(self.hits, t, m) {
                self.increments.push(StageIncrement { t, from: m, candidate: Some(gm), density: Some(Density::new(self.hits, t)) });
                self.stage += 1;
            }
        }
        Ok(Move { output, source: Source::Guesser, flag: late || g.fallback })
    }

    fn current_guess(&self) -> Option<usize> {
        self.guess
    }

    fn stats(&self) -> GeneratorStats {
        GeneratorStats { fallbacks: self.fallbacks, stage: self.stage, ..GeneratorStats::default() }
    }

    fn name(&self) -> &'static str {
        "gcg"
    }
}
