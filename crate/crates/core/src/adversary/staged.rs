use std::io::Write;
use std::sync::Arc;

use rand::Rng;
use rustc_hash::FxHashSet;
use serde::Serialize;

use super::Adversary;
use crate::error::{invalid, Error, Result};
use crate::generator::{Generator, StepContext};
use crate::lang::{Language, LanguageCollection, StringId, UsedSet};
use crate::metrics::Density;
use crate::rng::{substream, PROBE_SEEDS};
use crate::schedule::DeadlineFn;

/// Builds a fresh instance of the generator under attack from a seed.
pub type ProbeFactory = Arc<dyn Fn(u64) -> Result<Box<dyn Generator>> + Send + Sync>;

/// One stage of a staged chain run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub j: usize,
    /// Switch time, or the last time played for an incomplete stage.
    pub t: u64,
    pub i: u64,
    /// `|L^j ∩ L^∞_i| / i`.
    pub density: Density,
    /// Mean over probes of `|probe outputs \ L^j| / i`.
    pub probe_fraction: f64,
    pub complete: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StageLog {
    pub stages: Vec<StageRecord>,
}

impl StageLog {
    pub fn completed(&self) -> impl Iterator<Item = &StageRecord> {
        self.stages.iter().filter(|s| s.complete)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["j", "t_j", "i_j", "density", "probe_fraction", "complete"])?;
        for s in &self.stages {
            w.write_record([
                s.j.to_string(),
                s.t.to_string(),
                s.i.to_string(),
                s.density.to_f64().to_string(),
                s.probe_fraction.to_string(),
                s.complete.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug)]
struct Probe {
    generator: Box<dyn Generator>,
    used: UsedSet,
    outputs: Vec<StringId>,
}

/// Enumerates `L^1, L^2, …` of a chain in stages. Stage `j` continues an
/// enumeration of `L^j` and ends at the first time `t = D(i)` at which
/// `L^j` is sparse in `L^∞_i`, the probes rarely leave `L^j`, and every
/// member of `L^j` among `L^∞_i` has been emitted. After the last level it
/// enumerates `L^∞`.
#[derive(Debug)]
pub struct StagedChain {
    chain: Arc<LanguageCollection>,
    limit: Arc<dyn Language>,
    deadline: DeadlineFn,
    probes: Vec<Probe>,
    levels: usize,
    stage: usize,
    cursor: StringId,
    emitted: FxHashSet<StringId>,
    /// Probe outputs outside `L^stage`, summed over probes.
    off_stage: u64,
    last_t: u64,
    log: StageLog,
}

impl StagedChain {
    /// `probes` instances are built with seeds drawn from `seed`; use one
    /// probe for deterministic generators.
    pub fn new(chain: Arc<LanguageCollection>, deadline: DeadlineFn, factory: ProbeFactory, probes: usize, seed: u64) -> Result<Self> {
        let info = chain.chain_info().ok_or_else(|| invalid("staged chain adversary needs a declared chain"))?;
        if probes == 0 {
            return Err(invalid("staged chain adversary needs at least one probe"));
        }
        let limit = chain.language(info.limit_index)?.clone();
        let mut seeds = substream(seed, PROBE_SEEDS);
        let probes = (0..probes)
            .map(|_| Ok(Probe { generator: factory(seeds.random())?, used: UsedSet::new(), outputs: Vec::new() }))
            .collect::<Result<Vec<_>>>()?;
        let start = chain.language(1)?.nth(1)?;
        Ok(Self {
            chain,
            limit,
            deadline,
            probes,
            levels: info.limit_index - 1,
            stage: 1,
            cursor: start,
            emitted: FxHashSet::default(),
            off_stage: 0,
            last_t: 0,
            log: StageLog::default(),
        })
    }

    /// Current stage; `levels + 1` once enumerating the limit.
    pub fn stage(&self) -> usize {
        self.stage
    }

    fn stage_language(&self) -> Result<Arc<dyn Language>> {
        Ok(self.chain.language(self.stage)?.clone())
    }

    /// Smallest member of the stage language at or after the cursor that
    /// has not been emitted yet.
    fn next_unemitted(&mut self, lang: &dyn Language) -> Result<StringId> {
        let mut x = lang.first_at_or_after(self.cursor)?;
        while self.emitted.contains(&x) {
            x = lang.first_at_or_after(StringId(x.0 + 1))?;
        }
        self.cursor = x;
        Ok(x)
    }

    fn probe_fraction(&self, i: u64) -> f64 {
        self.off_stage as f64 / (self.probes.len() as f64 * i as f64)
    }

    fn try_switch(&mut self, t: u64, lang: &dyn Language) -> Result<()> {
        let i = self.deadline.inverse(t);
        if self.deadline.eval(i) != t {
            return Ok(());
        }
        let j = self.stage as u32;
        let boundary = self.limit.nth(i)?;
        let members = lang.rank_leq(boundary);
        if u128::from(members) << (j + 1) > u128::from(i) {
            return Ok(());
        }
        if u128::from(self.off_stage) << (2 * j + 1) > u128::from(self.probes.len() as u64) * u128::from(i) {
            return Ok(());
        }
        if self.next_unemitted(lang)? <= boundary {
            return Ok(());
        }
        self.log.stages.push(StageRecord {
            j: self.stage,
            t,
            i,
            density: Density::new(members, i),
            probe_fraction: self.probe_fraction(i),
            complete: true,
        });
        self.stage += 1;
        self.cursor = self.stage_language()?.nth(1)?;
        if self.stage <= self.levels {
            let next = self.stage_language()?;
            self.off_stage =
                self.probes.iter().flat_map(|p| p.outputs.iter()).filter(|o| !next.contains(**o)).count() as u64;
        }
        Ok(())
    }
}

impl Adversary for StagedChain {
    fn emit(&mut self, t: u64, _used: &UsedSet) -> Result<StringId> {
        let lang = self.stage_language()?;
        let x = self.next_unemitted(lang.as_ref())?;
        self.emitted.insert(x);
        self.last_t = t;
        if self.stage > self.levels {
            return Ok(x);
        }
        for p in &mut self.probes {
            p.used.insert(x);
            let mv = p.generator.step(&StepContext { t, observation: x, used: &p.used })?;
            if !p.used.insert(mv.output) {
                return Err(Error::EngineInvariant { t, detail: format!("probe repeated {}", mv.output) });
            }
            p.outputs.push(mv.output);
            if !lang.contains(mv.output) {
                self.off_stage += 1;
            }
        }
        self.try_switch(t, lang.as_ref())?;
        Ok(x)
    }

    fn stage_log(&self) -> Option<StageLog> {
        let mut log = self.log.clone();
        if self.stage <= self.levels && self.last_t > 0 {
            let i = self.deadline.inverse(self.last_t).max(1);
            let members = self.limit.nth(i).map(|b| self.chain.language(self.stage).map(|l| l.rank_leq(b)));
            if let Ok(Ok(members)) = members {
                log.stages.push(StageRecord {
                    j: self.stage,
                    t: self.last_t,
                    i,
                    density: Density::new(members, i),
                    probe_fraction: self.probe_fraction(i),
                    complete: false,
                });
            }
        }
        Some(log)
    }

    fn name(&self) -> &'static str {
        "staged_chain"
    }
}
