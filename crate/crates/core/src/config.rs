//! Declarative game configurations, read from TOML.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::adversary::{Adversary, Aggressive, Canonical, Contaminated, Partial, ProbeFactory, StagedChain};
use crate::engine::{run_game, replay_metrics, Game, GameTrace};
use crate::error::{Error, Result};
use crate::generator::{Gcg, Generator, Greedy, Sbg, SpeculationBudget, Tolerance};
use crate::lang::{
    make_block_partition_chain_with, make_marker_interval_chain_with, BlockGrowth, Language, LanguageCollection,
    MarkerSpacing, StringId, DEFAULT_BOUND,
};
use crate::metrics::{default_checkpoints, MetricSeries};
use crate::rng::child_seed;
use crate::schedule::{choose_speculation_budget, DeadlineFn, RateFn};

fn default_bound() -> u64 {
    DEFAULT_BOUND
}

fn default_probes() -> usize {
    1
}

fn config_err(e: impl std::fmt::Display) -> Error {
    Error::Config(e.to_string())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingKind {
    #[default]
    Geometric,
    Polynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CollectionSpec {
    BlockPartition {
        levels: u64,
        #[serde(default = "dyadic")]
        growth: BlockGrowth,
        #[serde(default = "default_bound")]
        bound: u64,
    },
    MarkerInterval {
        levels: u64,
        #[serde(default)]
        spacing: SpacingKind,
        base: Option<u64>,
        power: Option<u32>,
        #[serde(default = "default_bound")]
        bound: u64,
    },
}

fn dyadic() -> BlockGrowth {
    BlockGrowth::Dyadic
}

impl CollectionSpec {
    pub fn build(&self) -> Result<LanguageCollection> {
        match *self {
            CollectionSpec::BlockPartition { levels, growth, bound } => make_block_partition_chain_with(growth, levels, bound),
            CollectionSpec::MarkerInterval { levels, spacing, base, power, bound } => {
                let spacing = match spacing {
                    SpacingKind::Geometric => MarkerSpacing::Geometric { base: base.unwrap_or(2) },
                    SpacingKind::Polynomial => MarkerSpacing::Polynomial { power: power.unwrap_or(2) },
                };
                make_marker_interval_chain_with(spacing, levels, bound)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DeadlineSpec {
    Identity,
    Linear { c: u64 },
    Power { num: u32, den: u32 },
    PowerAlpha { alpha: f64 },
    Table { values: Vec<u64> },
}

impl DeadlineSpec {
    pub fn build(&self) -> Result<DeadlineFn> {
        match self {
            DeadlineSpec::Identity => Ok(DeadlineFn::Identity),
            DeadlineSpec::Linear { c } => DeadlineFn::linear(*c),
            DeadlineSpec::Power { num, den } => DeadlineFn::power(*num, *den),
            DeadlineSpec::PowerAlpha { alpha } => DeadlineFn::power_alpha(*alpha),
            DeadlineSpec::Table { values } => DeadlineFn::table(values.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RateSpec {
    Power { beta: f64 },
    Constant { value: f64 },
    Table { values: Vec<f64> },
}

impl RateSpec {
    pub fn build(&self) -> Result<RateFn> {
        match self {
            RateSpec::Power { beta } => RateFn::power(*beta),
            RateSpec::Constant { value } => RateFn::constant(*value),
            RateSpec::Table { values } => RateFn::table(values.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AdversarySpec {
    Canonical,
    Aggressive,
    Partial { alpha: f64, p: u64, q: u64 },
    Contaminated { insertions: Vec<u64>, omissions: Vec<u64> },
    /// Requires the target to be the chain's limit.
    StagedChain {
        #[serde(default = "default_probes")]
        probes: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BudgetSpec {
    /// Built from the profile up to the run horizon.
    Auto,
    Constant { value: u64 },
    Table { values: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    Greedy {
        #[serde(default)]
        tolerance: Tolerance,
    },
    Gcg {
        #[serde(default)]
        tolerance: Tolerance,
    },
    /// SBG over a greedy blackbox.
    Sbg {
        rate: RateSpec,
        #[serde(default = "auto_budget")]
        budget: BudgetSpec,
        #[serde(default)]
        tolerance: Tolerance,
    },
}

fn auto_budget() -> BudgetSpec {
    BudgetSpec::Auto
}

impl GeneratorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::Greedy { .. } => "greedy",
            GeneratorSpec::Gcg { .. } => "gcg",
            GeneratorSpec::Sbg { .. } => "sbg",
        }
    }

    /// The speculation budget an SBG spec resolves to under `deadline`.
    pub fn budget(&self, deadline: &DeadlineFn, horizon: u64) -> Result<Option<SpeculationBudget>> {
        let GeneratorSpec::Sbg { rate, budget, .. } = self else {
            return Ok(None);
        };
        Ok(Some(match budget {
            BudgetSpec::Auto => SpeculationBudget::Staircase(choose_speculation_budget(deadline, &rate.build()?, horizon)?),
            BudgetSpec::Constant { value } => SpeculationBudget::Constant(*value),
            BudgetSpec::Table { values } => SpeculationBudget::Table(values.clone()),
        }))
    }
}

/// Builds generators for one collection and deadline.
#[derive(Debug, Clone)]
pub struct GeneratorFactory {
    spec: GeneratorSpec,
    collection: Arc<LanguageCollection>,
    deadline: DeadlineFn,
    budget: Option<SpeculationBudget>,
}

impl GeneratorFactory {
    pub fn new(spec: GeneratorSpec, collection: Arc<LanguageCollection>, deadline: DeadlineFn, horizon: u64) -> Result<Self> {
        let budget = spec.budget(&deadline, horizon)?;
        Ok(Self { spec, collection, deadline, budget })
    }

    pub fn budget(&self) -> Option<&SpeculationBudget> {
        self.budget.as_ref()
    }

    pub fn build(&self, seed: u64) -> Result<Box<dyn Generator>> {
        let c = self.collection.clone();
        Ok(match &self.spec {
            GeneratorSpec::Greedy { tolerance } => Box::new(Greedy::new(c, *tolerance)),
            GeneratorSpec::Gcg { tolerance } => Box::new(Gcg::new(c, self.deadline.clone(), *tolerance)),
            GeneratorSpec::Sbg { tolerance, .. } => {
                let budget = self.budget.clone().expect("sbg factory resolves its budget");
                let blackbox = Box::new(Greedy::new(c.clone(), *tolerance));
                Box::new(Sbg::new(c, self.deadline.clone(), budget, blackbox, seed)?)
            }
        })
    }
}

/// A single game: `(collection, K, adversary, generator, D)` plus horizon,
/// seed and checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub collection: CollectionSpec,
    /// 1-based collection index of the target `K`.
    pub target: usize,
    pub adversary: AdversarySpec,
    pub generator: GeneratorSpec,
    pub deadline: DeadlineSpec,
    pub horizon: u64,
    #[serde(default)]
    pub seed: u64,
    /// Prefix indices; defaults to `⌈1.3^k⌉` with `D(i) <= horizon`.
    #[serde(default)]
    pub checkpoints: Option<Vec<u64>>,
}

/// A validated configuration with its languages built.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: GameConfig,
    pub collection: Arc<LanguageCollection>,
    pub target: Arc<dyn Language>,
    pub deadline: DeadlineFn,
    pub checkpoints: Vec<u64>,
    pub generators: GeneratorFactory,
}

/// Trace and metrics of one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub trace: GameTrace,
    pub metrics: MetricSeries,
}

impl GameConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(config_err)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(config_err)
    }

    pub fn to_json(&self) -> Result<serde_json::Value> {
        Ok(serde_json::to_value(self)?)
    }

    /// Validates the configuration and builds its languages.
    pub fn scenario(&self) -> Result<Scenario> {
        let collection = Arc::new(self.collection.build().map_err(config_err)?);
        let target = collection.get(self.target).cloned().ok_or_else(|| {
            config_err(format!("target {} is outside the collection 1..={}", self.target, collection.len()))
        })?;
        if self.horizon == 0 {
            return Err(config_err("horizon must be >= 1"));
        }
        if matches!(self.adversary, AdversarySpec::StagedChain { .. })
            && collection.chain_info().map(|c| c.limit_index) != Some(self.target)
        {
            return Err(config_err("the staged chain adversary enumerates the chain limit; set target to it"));
        }
        let deadline = self.deadline.build().map_err(config_err)?;
        let checkpoints = match &self.checkpoints {
            Some(c) => {
                if c.windows(2).any(|w| w[0] >= w[1]) || c.first() == Some(&0) {
                    return Err(config_err("checkpoints must be strictly increasing and >= 1"));
                }
                if let Some(&last) = c.last() {
                    if deadline.eval(last) > self.horizon {
                        return Err(config_err(format!("checkpoint {last} has D(i) past the horizon")));
                    }
                }
                c.clone()
            }
            None => default_checkpoints(&deadline, self.horizon),
        };
        let generators = GeneratorFactory::new(self.generator.clone(), collection.clone(), deadline.clone(), self.horizon)
            .map_err(config_err)?;
        let scenario = Scenario { config: self.clone(), collection, target, deadline, checkpoints, generators };
        scenario.adversary().map_err(config_err)?;
        Ok(scenario)
    }
}

impl Scenario {
    pub fn adversary(&self) -> Result<Box<dyn Adversary>> {
        let k = self.target.clone();
        Ok(match &self.config.adversary {
            AdversarySpec::Canonical => Box::new(Canonical::new(k)),
            AdversarySpec::Aggressive => Box::new(Aggressive::new(k)),
            AdversarySpec::Partial { alpha, p, q } => Box::new(Partial::new(k, *alpha, *p, *q)?),
            AdversarySpec::Contaminated { insertions, omissions } => Box::new(Contaminated::new(
                k,
                insertions.iter().copied().map(StringId).collect(),
                omissions.iter().copied().map(StringId).collect(),
            )?),
            AdversarySpec::StagedChain { probes } => {
                let generators = self.generators.clone();
                let factory: ProbeFactory = Arc::new(move |seed| generators.build(seed));
                Box::new(StagedChain::new(
                    self.collection.clone(),
                    self.deadline.clone(),
                    factory,
                    *probes,
                    child_seed(self.config.seed, "adversary"),
                )?)
            }
        })
    }

    pub fn game(&self) -> Result<Game> {
        Ok(Game {
            target: self.target.clone(),
            adversary: self.adversary()?,
            generator: self.generators.build(self.config.seed)?,
            horizon: self.config.horizon,
        })
    }

    /// Plays the game and replays its metrics. Stage-switch indices of a
    /// staged adversary are added to the checkpoints.
    pub fn run(&self) -> Result<RunOutput> {
        let trace = run_game(self.game()?)?;
        let mut checkpoints = self.checkpoints.clone();
        if let Some(log) = &trace.stage_log {
            checkpoints.extend(log.completed().map(|s| s.i));
            checkpoints.sort_unstable();
            checkpoints.dedup();
        }
        let metrics = replay_metrics(&trace, self.target.as_ref(), &self.deadline, &checkpoints)?;
        Ok(RunOutput { trace, metrics })
    }

    /// The same scenario with another seed.
    pub fn with_seed(&self, seed: u64) -> Scenario {
        let mut s = self.clone();
        s.config.seed = seed;
        s
    }
}
