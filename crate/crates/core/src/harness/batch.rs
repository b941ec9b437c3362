use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::Serialize;

use crate::adversary::StageLog;
use crate::config::Scenario;
use crate::engine::GameTrace;
use crate::error::{invalid, Result};
use crate::generator::GeneratorStats;
use crate::metrics::{Metric, MetricSeries, MetricSummary};

/// Outcome of one seeded run.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    pub trace_sha256: String,
    pub hallucinations: u64,
    /// Hallucinations among the last `⌊T/2⌋` steps.
    pub late_hallucinations: u64,
    pub stats: GeneratorStats,
    pub summary: MetricSummary,
    pub metrics: MetricSeries,
    pub stage_log: Option<StageLog>,
    #[serde(skip)]
    pub trace: Option<GameTrace>,
}

impl RunRecord {
    fn new(seed: u64, trace: GameTrace, metrics: MetricSeries, keep_trace: bool) -> Result<Self> {
        let half = trace.rows.len() - trace.rows.len() / 2;
        Ok(Self {
            seed,
            trace_sha256: trace.content_hash()?,
            hallucinations: trace.hallucinations(),
            late_hallucinations: trace.rows[half..].iter().filter(|r| r.halluc).count() as u64,
            stats: trace.stats,
            summary: metrics.summary()?,
            stage_log: trace.stage_log.clone(),
            metrics,
            trace: keep_trace.then_some(trace),
        })
    }
}

/// Runs `scenario` once per seed on a pool of `jobs` threads. Records come
/// back sorted by seed.
pub fn run_batch(scenario: &Scenario, seeds: &[u64], jobs: usize, keep_traces: bool) -> Result<Vec<RunRecord>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| invalid(format!("thread pool: {e}")))?;
    let mut runs = pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| {
                let out = scenario.with_seed(seed).run()?;
                RunRecord::new(seed, out.trace, out.metrics, keep_traces)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    runs.sort_by_key(|r| r.seed);
    Ok(runs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl Stat {
    fn of(values: &[f64]) -> Self {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self { mean, min, max }
    }
}

/// Cross-seed statistics at one checkpoint index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub index: u64,
    pub time: u64,
    pub mu_el: Stat,
    pub mu_pfx: Stat,
    pub halluc_rate: Stat,
    pub union_density: Stat,
}

impl AggregateRow {
    pub fn stat(&self, metric: Metric) -> Stat {
        match metric {
            Metric::MuEl => self.mu_el,
            Metric::MuPfx => self.mu_pfx,
            Metric::HallucRate => self.halluc_rate,
            Metric::Union => self.union_density,
        }
    }
}

/// Mean, min and max per checkpoint over the checkpoints every run shares.
pub fn aggregate(runs: &[RunRecord]) -> Vec<AggregateRow> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    let shared: Vec<u64> = first
        .metrics
        .rows
        .iter()
        .map(|r| r.index)
        .filter(|i| {
            runs[1..].iter().all(|run| run.metrics.rows.iter().any(|r| r.index == *i))
        })
        .collect();
    let wanted: FxHashSet<u64> = shared.iter().copied().collect();
    let columns: Vec<Vec<_>> =
        runs.iter().map(|run| run.metrics.rows.iter().filter(|r| wanted.contains(&r.index)).collect()).collect();
    shared
        .iter()
        .enumerate()
        .map(|(k, &index)| {
            let pick = |f: &dyn Fn(&crate::metrics::CheckpointRow) -> f64| {
                Stat::of(&columns.iter().map(|c| f(c[k])).collect::<Vec<_>>())
            };
            AggregateRow {
                index,
                time: columns[0][k].time,
                mu_el: pick(&|r| r.mu_el.to_f64()),
                mu_pfx: pick(&|r| r.mu_pfx.to_f64()),
                halluc_rate: pick(&|r| r.halluc_rate),
                union_density: pick(&|r| r.union_density.to_f64()),
            }
        })
        .collect()
}
