//! Experiment presets, the seed-parallel batch runner and report emission.

mod batch;
mod presets;
mod report;

use std::fmt;

use serde::Serialize;

use crate::config::GameConfig;
use crate::error::{invalid, Result};
use crate::metrics::{Metric, MetricSeries};

pub use batch::{aggregate, run_batch, AggregateRow, RunRecord, Stat};
pub use presets::{
    calibrations, construction_profile, e1_metric_routes, e2_chain_decay, e3_sbg_density, e4a_staged_greedy, e4b_staged_sbg, e5_gcg_upper,
    e6_data_models, e7_constructions, golden_sweep, profile_table, Calibration, PresetInfo, PRESETS,
};
pub use report::{write_preset_report, write_run};

/// Fraction of a pilot tail value that becomes the frozen threshold.
pub const PILOT_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    Le,
    Ge,
    Eq,
}

impl Comparator {
    pub fn holds(self, observed: f64, threshold: f64) -> bool {
        match self {
            Comparator::Le => observed <= threshold,
            Comparator::Ge => observed >= threshold,
            Comparator::Eq => observed == threshold,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Le => "<=",
            Comparator::Ge => ">=",
            Comparator::Eq => "==",
        }
    }
}

/// Where a threshold comes from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum Provenance {
    /// Exact consequence of a construction; holds for every run.
    Exact { note: String },
    /// [`PILOT_FRACTION`] of the tail value seen in a pilot run.
    Pilot { horizon: u64, tail: f64 },
    /// A fixed target value.
    Stated { note: String },
}

impl Provenance {
    pub fn exact(note: impl Into<String>) -> Self {
        Provenance::Exact { note: note.into() }
    }

    pub fn stated(note: impl Into<String>) -> Self {
        Provenance::Stated { note: note.into() }
    }

    pub fn is_pilot(&self) -> bool {
        matches!(self, Provenance::Pilot { .. })
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Exact { note } => write!(f, "exact: {note}"),
            Provenance::Pilot { horizon, tail } => write!(f, "pilot: {PILOT_FRACTION} x tail {tail} at T={horizon}"),
            Provenance::Stated { note } => write!(f, "stated: {note}"),
        }
    }
}

/// One checked claim of a preset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    /// Acceptance criterion label, e.g. `A3(i)`.
    pub criterion: String,
    pub scenario: String,
    pub metric: String,
    pub checkpoint: String,
    pub comparator: Comparator,
    pub threshold: f64,
    pub provenance: Provenance,
    pub observed: f64,
    pub passed: bool,
}

impl Assertion {
    pub fn check(
        criterion: &str,
        scenario: &str,
        metric: impl Into<String>,
        checkpoint: impl Into<String>,
        comparator: Comparator,
        threshold: f64,
        provenance: Provenance,
        observed: f64,
    ) -> Self {
        Self {
            criterion: criterion.into(),
            scenario: scenario.into(),
            metric: metric.into(),
            checkpoint: checkpoint.into(),
            comparator,
            threshold,
            provenance,
            observed,
            passed: comparator.holds(observed, threshold),
        }
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} [{}] {} @ {}: observed {} {} {} ({})",
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion,
            self.scenario,
            self.metric,
            self.checkpoint,
            self.observed,
            self.comparator.symbol(),
            self.threshold,
            self.provenance,
        )
    }
}

/// A named CSV table emitted by a preset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: impl std::io::Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k].as_str()).collect())
    }
}

/// Runs of one configuration template over a seed list.
#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub label: String,
    pub config: GameConfig,
    pub runs: Vec<RunRecord>,
    pub aggregate: Vec<AggregateRow>,
}

impl ScenarioReport {
    pub fn new(label: &str, config: GameConfig, runs: Vec<RunRecord>) -> Self {
        let aggregate = aggregate(&runs);
        Self { label: label.into(), config, runs, aggregate }
    }

    /// Seed-mean of a metric over the shared checkpoints.
    pub fn mean_column(&self, metric: Metric) -> Vec<(u64, f64)> {
        self.aggregate.iter().map(|r| (r.index, r.stat(metric).mean)).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PresetReport {
    pub name: String,
    pub pilot: bool,
    pub scenarios: Vec<ScenarioReport>,
    pub tables: Vec<Table>,
    pub assertions: Vec<Assertion>,
}

impl PresetReport {
    pub fn new(name: &str, opts: &PresetOptions) -> Self {
        Self { name: name.into(), pilot: opts.pilot, scenarios: Vec::new(), tables: Vec::new(), assertions: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.passed)
    }

    pub fn scenario(&self, label: &str) -> Option<&ScenarioReport> {
        self.scenarios.iter().find(|s| s.label == label)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// Assertions whose criterion starts with `prefix`.
    pub fn criterion<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Assertion> + 'a {
        self.assertions.iter().filter(move |a| a.criterion.starts_with(prefix))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresetOptions {
    /// Seed count; seeds are `1..=n`. `None` keeps the preset default.
    pub seeds: Option<u64>,
    /// Overrides the preset horizon of every game.
    pub horizon: Option<u64>,
    pub jobs: usize,
    /// Doubles every horizon so tails can be read off for calibration.
    pub pilot: bool,
    /// Keep full traces in the run records.
    pub keep_traces: bool,
}

impl Default for PresetOptions {
    fn default() -> Self {
        Self {
            seeds: None,
            horizon: None,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
            pilot: false,
            keep_traces: false,
        }
    }
}

impl PresetOptions {
    pub fn seed_list(&self, default: u64) -> Vec<u64> {
        (1..=self.seeds.unwrap_or(default).max(1)).collect()
    }

    pub fn horizon(&self, default: u64) -> u64 {
        let base = self.horizon.unwrap_or(default);
        if self.pilot {
            base * 2
        } else {
            base
        }
    }
}

/// Runs a preset by name (case-insensitive).
pub fn run_preset(name: &str, opts: &PresetOptions) -> Result<PresetReport> {
    let info = PRESETS
        .iter()
        .find(|p| p.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| invalid(format!("unknown preset {name:?}")))?;
    (info.run)(opts)
}

/// Number of places where `values` goes up.
pub fn increases(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] > w[0]).count()
}

/// Number of places where `values` fails to go up.
pub fn non_increases(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] <= w[0]).count()
}

/// Number of places where `values` goes down.
pub fn decreases(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] < w[0]).count()
}

/// Number of places where `values` fails to go down.
pub fn non_decreases(values: &[f64]) -> usize {
    values.windows(2).filter(|w| w[1] >= w[0]).count()
}

fn last_n(series: &[(u64, f64)], n: usize) -> Vec<f64> {
    series[series.len().saturating_sub(n)..].iter().map(|p| p.1).collect()
}

/// Column of a single run, for assertions that look at one seed.
pub fn run_column(metrics: &MetricSeries, metric: Metric) -> Vec<f64> {
    metrics.column(metric).into_iter().map(|p| p.1).collect()
}
