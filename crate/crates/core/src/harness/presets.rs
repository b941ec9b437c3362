use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    decreases, increases, last_n, non_decreases, run_batch, Assertion, Comparator, PresetOptions, PresetReport,
    Provenance, ScenarioReport, Table, PILOT_FRACTION,
};
use crate::config::{
    AdversarySpec, BudgetSpec, CollectionSpec, DeadlineSpec, GameConfig, GeneratorSpec, RateSpec, SpacingKind,
};
use crate::error::Result;
use crate::generator::Tolerance;
use crate::lang::{
    make_block_partition_chain, make_marker_interval_chain, plain_prefix_density, BlockGrowth, Language,
    PredicateLanguage, StringId,
};
use crate::metrics::{prefixwise_density, timely_elementwise_density, union_density, Metric, MetricSeries};
use crate::rng::substream;
use crate::schedule::{build_prefix_deadline, build_prefix_hallucination, DeadlineFn, RateFn};

/// A registered preset.
#[derive(Debug, Clone, Copy)]
pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub run: fn(&PresetOptions) -> Result<PresetReport>,
}

pub const PRESETS: &[PresetInfo] = &[
    PresetInfo { name: "E1", description: "metric evaluation routes agree; el-density never exceeds pfx-density", run: e1_metric_routes },
    PresetInfo { name: "E2", description: "measure-zero chain decay of block and marker chains", run: e2_chain_decay },
    PresetInfo { name: "E3", description: "SBG density, hallucination and speculation counts", run: e3_sbg_density },
    PresetInfo { name: "E4a", description: "greedy generator against the staged chain adversary", run: e4a_staged_greedy },
    PresetInfo { name: "E4b", description: "SBG with a starved budget under a linear deadline, staged adversary", run: e4b_staged_sbg },
    PresetInfo { name: "E5", description: "GCG upper element-wise density under the identity deadline", run: e5_gcg_upper },
    PresetInfo { name: "E6", description: "SBG under partial and contaminated enumerations", run: e6_data_models },
    PresetInfo { name: "E7", description: "prefix-wise deadline and hallucination constructions", run: e7_constructions },
    PresetInfo { name: "golden", description: "exploratory sweep of density crossing times over deadline exponent and target level", run: golden_sweep },
];

/// A tail value observed in a pilot run at twice the preset horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub criterion: &'static str,
    pub scenario: &'static str,
    pub metric: &'static str,
    pub horizon: u64,
    pub tail: f64,
}

impl Calibration {
    pub fn threshold(&self) -> f64 {
        PILOT_FRACTION * self.tail
    }

    pub fn provenance(&self) -> Provenance {
        Provenance::Pilot { horizon: self.horizon, tail: self.tail }
    }
}

const E3_MARKER: Calibration = Calibration {
    criterion: "A3(i)",
    scenario: "marker_l3",
    metric: "seed-mean mu_pfx",
    horizon: 2_000_000,
    tail: 0.5030,
};
const E5_CANONICAL: Calibration = Calibration {
    criterion: "A5",
    scenario: "canonical",
    metric: "seed-mean tail max mu_el",
    horizon: 200_000,
    tail: 0.9999,
};
const E5_AGGRESSIVE: Calibration = Calibration {
    criterion: "A5",
    scenario: "aggressive",
    metric: "seed-mean tail max mu_el",
    horizon: 200_000,
    tail: 0.5035,
};
const E6_PARTIAL: Calibration = Calibration {
    criterion: "A9",
    scenario: "partial",
    metric: "seed-mean mu_pfx",
    horizon: 2_000_000,
    tail: 0.5512,
};
const E6_CONTAMINATED: Calibration = Calibration {
    criterion: "A9",
    scenario: "contaminated",
    metric: "seed-mean mu_pfx",
    horizon: 2_000_000,
    tail: 0.9630,
};

/// Frozen pilot calibrations of all presets.
pub fn calibrations() -> &'static [Calibration] {
    &[E3_MARKER, E5_CANONICAL, E5_AGGRESSIVE, E6_PARTIAL, E6_CONTAMINATED]
}

fn marker_chain(levels: u64) -> CollectionSpec {
    CollectionSpec::MarkerInterval {
        levels,
        spacing: SpacingKind::Polynomial,
        base: None,
        power: Some(2),
        bound: crate::lang::DEFAULT_BOUND,
    }
}

fn linear_blocks(levels: u64, bound: u64) -> CollectionSpec {
    CollectionSpec::BlockPartition { levels, growth: BlockGrowth::Linear, bound }
}

fn sbg(beta: f64, budget: BudgetSpec, tolerance: Tolerance) -> GeneratorSpec {
    GeneratorSpec::Sbg { rate: RateSpec::Power { beta }, budget, tolerance }
}

const SBG_BETA: f64 = 1.0 / 6.0;

fn sbg_main(opts: &PresetOptions, target: usize, adversary: AdversarySpec, tolerance: Tolerance) -> GameConfig {
    GameConfig {
        collection: marker_chain(4),
        target,
        adversary,
        generator: sbg(SBG_BETA, BudgetSpec::Auto, tolerance),
        deadline: DeadlineSpec::Power { num: 3, den: 2 },
        horizon: opts.horizon(1_000_000),
        seed: 0,
        checkpoints: None,
    }
}

fn run_scenario(label: &str, config: GameConfig, seeds: &[u64], opts: &PresetOptions) -> Result<ScenarioReport> {
    let scenario = config.scenario()?;
    let runs = run_batch(&scenario, seeds, opts.jobs, opts.keep_traces)?;
    Ok(ScenarioReport::new(label, config, runs))
}

fn final_mean(s: &ScenarioReport, metric: Metric) -> f64 {
    s.aggregate.last().map_or(f64::NAN, |r| r.stat(metric).mean)
}

fn pilot_check(report: &mut PresetReport, cal: Calibration, s: &ScenarioReport, checkpoint: &str, observed: f64) {
    report.assertions.push(Assertion::check(
        cal.criterion,
        &s.label,
        cal.metric,
        checkpoint,
        Comparator::Ge,
        cal.threshold(),
        cal.provenance(),
        observed,
    ));
}

/// Rate bound at `T` and the last-3-checkpoint trend of the mean rate.
fn hallucination_checks(report: &mut PresetReport, criterion: &str, s: &ScenarioReport, beta: f64) {
    let horizon = s.config.horizon;
    let bound = RateFn::Power { beta }.eval(horizon);
    let worst = s.runs.iter().map(|r| r.metrics.final_halluc.rate).fold(0.0, f64::max);
    report.assertions.push(Assertion::check(
        criterion,
        &s.label,
        "max over seeds of hallucination rate",
        format!("t = T = {horizon}"),
        Comparator::Le,
        bound,
        Provenance::stated(format!("H(T) = T^-{beta:.4}")),
        worst,
    ));
    let rates = last_n(&s.mean_column(Metric::HallucRate), 3);
    report.assertions.push(Assertion::check(
        criterion,
        &s.label,
        "increases of seed-mean hallucination rate",
        "last 3 checkpoints",
        Comparator::Eq,
        0.0,
        Provenance::stated("nonincreasing"),
        increases(&rates) as f64,
    ));
}

/// Uniform random instance: target inside `[0, 50)`, output and observation
/// sequences with repeats allowed, and a monotone deadline.
struct Instance {
    k: Arc<dyn Language>,
    members: Vec<StringId>,
    o: Vec<StringId>,
    x: Vec<StringId>,
    d: DeadlineFn,
    checkpoints: Vec<u64>,
}

fn random_instance(rng: &mut ChaCha8Rng) -> Result<Instance> {
    let mut mask = 0u64;
    while mask.count_ones() == 0 {
        mask = rng.random::<u64>() & ((1 << 50) - 1);
        if rng.random_bool(0.5) {
            mask &= rng.random::<u64>();
        }
    }
    let members: Vec<StringId> = (0..50).filter(|b| mask >> b & 1 == 1).map(StringId).collect();
    let k: Arc<dyn Language> = Arc::new(PredicateLanguage::new("random", 0, move |v| v < 50 && mask >> v & 1 == 1).with_bound(49));
    let d = match rng.random_range(0..4) {
        0 => DeadlineFn::Identity,
        1 => DeadlineFn::linear(rng.random_range(1..4))?,
        2 => DeadlineFn::power(3, 2)?,
        _ => DeadlineFn::power(2, 1)?,
    };
    let max_i = rng.random_range(1..=members.len().min(30) as u64);
    let horizon = d.eval(max_i) + rng.random_range(0..5);
    let mut seq = |len: u64| -> Vec<StringId> { (0..len).map(|_| StringId(rng.random_range(0..50))).collect() };
    let o = seq(horizon);
    let x = seq(horizon);
    let checkpoints = (1..=max_i).collect();
    Ok(Instance { k, members, o, x, d, checkpoints })
}

/// Checkpoint rows that disagree with the point evaluators.
fn route_mismatches(inst: &Instance) -> Result<u64> {
    let series = MetricSeries::compute(&inst.o, &inst.x, inst.k.as_ref(), &inst.d, &inst.checkpoints)?;
    let mut bad = 0;
    for row in &series.rows {
        let el = timely_elementwise_density(&inst.o, &inst.members, &inst.d, row.index)?;
        let pfx = prefixwise_density(&inst.o, &inst.members, &inst.d, row.index)?;
        let uni = union_density(&inst.o, &inst.x, inst.k.as_ref(), &inst.d, row.index)?;
        if el != row.mu_el || pfx != row.mu_pfx || uni != row.union_density {
            bad += 1;
        }
    }
    Ok(bad)
}

pub fn e1_metric_routes(opts: &PresetOptions) -> Result<PresetReport> {
    let mut report = PresetReport::new("E1", opts);
    let mut table = Table::new("routes", &["seed", "instances", "route_mismatches", "order_instances", "order_violations"]);
    let (mut mismatches, mut violations) = (0u64, 0u64);
    for seed in opts.seed_list(1) {
        let mut rng = substream(seed, "e1-routes");
        let mut bad = 0;
        for _ in 0..1000 {
            bad += route_mismatches(&random_instance(&mut rng)?)?;
        }
        let mut rng = substream(seed, "e1-order");
        let mut worse = 0;
        for _ in 0..10_000 {
            let inst = random_instance(&mut rng)?;
            let series = MetricSeries::compute(&inst.o, &inst.x, inst.k.as_ref(), &inst.d, &inst.checkpoints)?;
            worse += series.rows.iter().filter(|r| r.mu_el > r.mu_pfx).count() as u64;
        }
        table.push(vec![seed.to_string(), "1000".into(), bad.to_string(), "10000".into(), worse.to_string()]);
        mismatches += bad;
        violations += worse;
    }
    report.assertions.push(Assertion::check(
        "A1",
        "random traces",
        "checkpoint rows where batch and point evaluators differ",
        "every index",
        Comparator::Eq,
        0.0,
        Provenance::exact("both routes evaluate the same definitions in rational arithmetic"),
        mismatches as f64,
    ));
    report.assertions.push(Assertion::check(
        "A6",
        "random instances",
        "checkpoint rows with mu_el > mu_pfx",
        "every index",
        Comparator::Eq,
        0.0,
        Provenance::exact("D(j) <= D(i) for j <= i"),
        violations as f64,
    ));
    report.tables.push(table);
    Ok(report)
}

pub fn e2_chain_decay(opts: &PresetOptions) -> Result<PresetReport> {
    let mut report = PresetReport::new("E2", opts);
    let mut table = Table::new("decay", &["family", "j", "k", "n", "hits", "density", "log_bound"]);
    let blocks = make_block_partition_chain(3)?;
    let markers = make_marker_interval_chain(2, 3)?;
    for (family, chain) in [("block_partition", &blocks), ("marker_interval", &markers)] {
        let limit = chain.limit().expect("chain").clone();
        for j in 1..=3usize {
            let lj = chain.language(j)?;
            let mut densities = Vec::new();
            let mut over_bound = 0u64;
            for k in 6..=20u32 {
                let n = 1u64 << k;
                let d = plain_prefix_density(lj.as_ref(), limit.as_ref(), n)?;
                let bound = (j as u64 + 1) * (u64::from(k) + 2);
                if family == "marker_interval" && d.hits > bound {
                    over_bound += 1;
                }
                densities.push(d.to_f64());
                table.push(vec![
                    family.into(),
                    j.to_string(),
                    k.to_string(),
                    n.to_string(),
                    d.hits.to_string(),
                    d.to_f64().to_string(),
                    bound.to_string(),
                ]);
            }
            let scenario = format!("{family} L^{j}");
            report.assertions.push(Assertion::check(
                "A2",
                &scenario,
                "steps where density fails to drop",
                "n = 2^k, k = 6..20",
                Comparator::Eq,
                0.0,
                Provenance::stated("strictly decreasing"),
                non_decreases(&densities) as f64,
            ));
            if family == "block_partition" {
                report.assertions.push(Assertion::check(
                    "A2",
                    &scenario,
                    "plain prefix density",
                    "n = 2^20",
                    Comparator::Le,
                    1e-3,
                    Provenance::stated("vanishing density"),
                    *densities.last().expect("nonempty"),
                ));
            } else {
                report.assertions.push(Assertion::check(
                    "A2",
                    &scenario,
                    "prefixes with more than (j+1)(floor(log2 n)+2) members",
                    "n = 2^k, k = 6..20",
                    Comparator::Eq,
                    0.0,
                    Provenance::exact("each marker contributes at most j+1 members"),
                    over_bound as f64,
                ));
            }
        }
    }
    report.tables.push(table);
    Ok(report)
}

/// `Σ_{k <= m(T)} C(k)` for a scenario's resolved budget.
fn budget_sum(config: &GameConfig) -> Result<u64> {
    let scenario = config.scenario()?;
    let Some(budget) = scenario.generators.budget() else {
        return Ok(0);
    };
    let epochs = scenario.deadline.inverse(config.horizon);
    Ok((1..=epochs).map(|m| budget.eval(m)).sum())
}

pub fn e3_sbg_density(opts: &PresetOptions) -> Result<PresetReport> {
    let mut report = PresetReport::new("E3", opts);
    let seeds = opts.seed_list(10);
    let main = sbg_main(opts, 3, AdversarySpec::Aggressive, Tolerance::Exact);
    let blocks = GameConfig { collection: linear_blocks(3, 1 << 62), target: 2, ..main.clone() };
    let alpha = GameConfig {
        target: 2,
        adversary: AdversarySpec::Canonical,
        deadline: DeadlineSpec::PowerAlpha { alpha: 0.5 },
        ..main.clone()
    };
    let sum_c = budget_sum(&main)?;
    let a = run_scenario("marker_l3", main, &seeds, opts)?;
    let b = run_scenario("block_l2", blocks, &seeds, opts)?;
    let c = run_scenario("marker_l2_canonical", alpha, &seeds, opts)?;

    pilot_check(&mut report, E3_MARKER, &a, "final checkpoint", final_mean(&a, Metric::MuPfx));
    hallucination_checks(&mut report, "A3(ii)", &a, SBG_BETA);
    let ratios: Vec<f64> = a.runs.iter().map(|r| r.stats.speculations as f64 / sum_c as f64).collect();
    let provenance = || Provenance::stated("speculation probability is 10 C(m) per epoch width");
    report.assertions.push(Assertion::check(
        "A3(iii)",
        &a.label,
        "min over seeds of speculations / sum C(k)",
        format!("t = T, sum C(k) = {sum_c}"),
        Comparator::Ge,
        2.0,
        provenance(),
        ratios.iter().copied().fold(f64::INFINITY, f64::min),
    ));
    report.assertions.push(Assertion::check(
        "A3(iii)",
        &a.label,
        "max over seeds of speculations / sum C(k)",
        format!("t = T, sum C(k) = {sum_c}"),
        Comparator::Le,
        18.0,
        provenance(),
        ratios.iter().copied().fold(0.0, f64::max),
    ));
    let unions = a.mean_column(Metric::Union);
    report.assertions.push(Assertion::check(
        "A8",
        &a.label,
        "decreases of seed-mean union density",
        "last 5 checkpoints",
        Comparator::Eq,
        0.0,
        Provenance::stated("nondecreasing"),
        decreases(&last_n(&unions, 5)) as f64,
    ));
    report.assertions.push(Assertion::check(
        "A8",
        &a.label,
        "seed-mean union density",
        "final checkpoint",
        Comparator::Ge,
        0.9,
        Provenance::stated("fixed at 0.9"),
        final_mean(&a, Metric::Union),
    ));
    report.scenarios.extend([a, b, c]);
    Ok(report)
}

fn staged_config(opts: &PresetOptions, generator: GeneratorSpec, deadline: DeadlineSpec, probes: usize, horizon: u64) -> GameConfig {
    GameConfig {
        collection: linear_blocks(9, 1 << 50),
        target: 10,
        adversary: AdversarySpec::StagedChain { probes },
        generator,
        deadline,
        horizon: opts.horizon(horizon),
        seed: 0,
        checkpoints: None,
    }
}

/// `(j, i_j, mu_el, mu_pfx)` at every completed stage of a run.
fn stage_points(run: &super::RunRecord) -> Vec<(usize, u64, f64, f64)> {
    let Some(log) = &run.stage_log else {
        return Vec::new();
    };
    log.completed()
        .filter_map(|s| {
            let row = run.metrics.rows.iter().find(|r| r.index == s.i)?;
            Some((s.j, s.i, row.mu_el.to_f64(), row.mu_pfx.to_f64()))
        })
        .collect()
}

fn stage_table(name: &str, s: &ScenarioReport) -> Table {
    let mut table = Table::new(name, &["seed", "j", "t_j", "i_j", "level_density", "probe_fraction", "mu_el", "mu_pfx"]);
    for run in &s.runs {
        let points = stage_points(run);
        for st in run.stage_log.iter().flat_map(|l| l.completed()) {
            let (el, pfx) = points.iter().find(|p| p.0 == st.j).map_or((f64::NAN, f64::NAN), |p| (p.2, p.3));
            table.push(vec![
                run.seed.to_string(),
                st.j.to_string(),
                st.t.to_string(),
                st.i.to_string(),
                st.density.to_f64().to_string(),
                st.probe_fraction.to_string(),
                el.to_string(),
                pfx.to_string(),
            ]);
        }
    }
    table
}

fn completed_stage_check(report: &mut PresetReport, criterion: &str, s: &ScenarioReport) {
    let fewest = s.runs.iter().map(|r| stage_points(r).len()).min().unwrap_or(0);
    report.assertions.push(Assertion::check(
        criterion,
        &s.label,
        "min over seeds of completed stages",
        format!("t <= {}", s.config.horizon),
        Comparator::Ge,
        3.0,
        Provenance::stated("J >= 3"),
        fewest as f64,
    ));
}

pub fn e4a_staged_greedy(opts: &PresetOptions) -> Result<PresetReport> {
    let mut report = PresetReport::new("E4a", opts);
    let config = staged_config(
        opts,
        GeneratorSpec::Greedy { tolerance: Tolerance::Exact },
        DeadlineSpec::Power { num: 6, den: 5 },
        1,
        2_000_000,
    );
    let s = run_scenario("greedy_linear_blocks", config, &opts.seed_list(1), opts)?;
    completed_stage_check(&mut report, "A4", &s);
    for run in &s.runs {
        for (j, i, el, pfx) in stage_points(run) {
            let at = format!("seed {} stage j={j}, i_j={i}", run.seed);
            report.assertions.push(Assertion::check(
                "A4",
                &s.label,
                "mu_pfx",
                at.clone(),
                Comparator::Le,
                0.5f64.powi(j as i32),
                Provenance::exact("2^-(j+1) level density plus 2^-(j+1) probe escape"),
                pfx,
            ));
            report.assertions.push(Assertion::check(
                "A4",
                &s.label,
                "mu_el - mu_pfx",
                at,
                Comparator::Le,
                0.0,
                Provenance::exact("monotone deadline"),
                el - pfx,
            ));
        }
    }
    report.tables.push(stage_table("stages", &s));
    report.scenarios.push(s);
    Ok(report)
}

pub fn e4b_staged_sbg(opts: &PresetOptions) -> Result<PresetReport> {
    let mut report = PresetReport::new("E4b", opts);
    let config = staged_config(
        opts,
        sbg(0.5, BudgetSpec::Constant { value: 2 }, Tolerance::Exact),
        DeadlineSpec::Linear { c: 2 },
        4,
        400_000,
    );
    let s = run_scenario("sbg_linear_deadline", config, &opts.seed_list(3), opts)?;
    completed_stage_check(&mut report, "A4(b)", &s);
    for run in &s.runs {
        let pfx: Vec<f64> = stage_points(run).iter().map(|p| p.3).collect();
        report.assertions.push(Assertion::check(
            "A4(b)",
            &s.label,
            "stages where mu_pfx fails to drop",
            format!("seed {} completed stages", run.seed),
            Comparator::Eq,
            0.0,
            Provenance::stated("strictly decreasing across stages"),
            non_decreases(&pfx) as f64,
        ));
    }
    report.tables.push(stage_table("stages", &s));
    report.scenarios.push(s);
    Ok(report)
}

pub fn e5_gcg_upper(opts: &PresetOptions) -> Result<PresetReport> {
    let mut report = PresetReport::new("E5", opts);
    let seeds = opts.seed_list(1);
    let base = GameConfig {
        collection: marker_chain(6),
        target: 4,
        adversary: AdversarySpec::Canonical,
        generator: GeneratorSpec::Gcg { tolerance: Tolerance::Exact },
        deadline: DeadlineSpec::Identity,
        horizon: opts.horizon(100_000),
        seed: 0,
        checkpoints: None,
    };
    let aggressive = GameConfig { adversary: AdversarySpec::Aggressive, ..base.clone() };
    for (cal, config) in [(E5_CANONICAL, base), (E5_AGGRESSIVE, aggressive)] {
        let s = run_scenario(cal.scenario, config, &seeds, opts)?;
        let upper = s.runs.iter().map(|r| r.summary.mu_el_tail.1).sum::<f64>() / s.runs.len() as f64;
        let window = s.runs[0].summary.tail_window;
        pilot_check(&mut report, cal, &s, &format!("max over last {window} checkpoints"), upper);
        let late = s.runs.iter().map(|r| r.late_hallucinations).max().unwrap_or(0);
        report.assertions.push(Assertion::check(
            "A5",
            &s.label,
            "max over seeds of hallucinations",
            "final half of the trace",
            Comparator::Eq,
            0.0,
            Provenance::stated("eventual consistency"),
            late as f64,
        ));
        report.scenarios.push(s);
    }
    Ok(report)
}

pub fn e6_data_models(opts: &PresetOptions) -> Result<PresetReport> {
    let mut report = PresetReport::new("E6", opts);
    let seeds = opts.seed_list(10);
    let partial = sbg_main(opts, 3, AdversarySpec::Partial { alpha: 0.5, p: 1, q: 2 }, Tolerance::Exact);
    let contaminated = sbg_main(
        opts,
        3,
        AdversarySpec::Contaminated { insertions: vec![8, 21, 40], omissions: vec![5, 10, 26] },
        Tolerance::Log2,
    );
    for (cal, config) in [(E6_PARTIAL, partial), (E6_CONTAMINATED, contaminated)] {
        let s = run_scenario(cal.scenario, config, &seeds, opts)?;
        pilot_check(&mut report, cal, &s, "final checkpoint", final_mean(&s, Metric::MuPfx));
        hallucination_checks(&mut report, "A9", &s, SBG_BETA);
        report.scenarios.push(s);
    }
    Ok(report)
}

/// Element-wise profile used by the construction preset.
pub fn construction_profile() -> Result<(DeadlineFn, RateFn)> {
    Ok((DeadlineFn::power(2, 1)?, RateFn::power(0.25)?))
}

pub fn e7_constructions(opts: &PresetOptions) -> Result<PresetReport> {
    let mut report = PresetReport::new("E7", opts);
    let horizon = opts.horizon(1_000_000);
    let (d_el, h_el) = construction_profile()?;
    let pd = build_prefix_deadline(&d_el, &h_el, horizon)?;
    let ph = build_prefix_hallucination(|t| pd.tau(t), &h_el, horizon)?;
    let mut table =
        Table::new("constructions", &["n", "d_el", "d_pfx", "s", "r", "r_over_i", "tau", "tau_over_t_h", "h_el", "h_pfx"]);
    let mut r_ratio = Vec::new();
    let mut tau_ratio = Vec::new();
    let mut n = 4u64;
    while n <= horizon {
        let rr = pd.r(n) as f64 / n as f64;
        let tr = pd.tau(n) as f64 / (n as f64 * h_el.eval(n));
        r_ratio.push(rr);
        tau_ratio.push(tr);
        table.push(vec![
            n.to_string(),
            d_el.eval(n).to_string(),
            pd.d_pfx.eval(n).to_string(),
            pd.s.eval(n).to_string(),
            pd.r(n).to_string(),
            rr.to_string(),
            pd.tau(n).to_string(),
            tr.to_string(),
            h_el.eval(n).to_string(),
            ph.h_pfx.eval(n).to_string(),
        ]);
        n *= 4;
    }
    let knee = r_ratio.iter().position(|&v| v < 0.1);
    let grid = "n = 4^k";
    report.assertions.push(Assertion::check(
        "A7(r)",
        "D_el = i^2, H_el = t^-1/4",
        "checkpoints with r(i)/i < 0.1",
        grid,
        Comparator::Ge,
        1.0,
        Provenance::stated("the ratio drops below 0.1"),
        r_ratio.iter().filter(|&&v| v < 0.1).count() as f64,
    ));
    report.assertions.push(Assertion::check(
        "A7(r)",
        "D_el = i^2, H_el = t^-1/4",
        "increases of r(i)/i past the first value below 0.1",
        grid,
        Comparator::Eq,
        0.0,
        Provenance::stated("nonincreasing past the knee"),
        knee.map_or(f64::NAN, |k| increases(&r_ratio[k..]) as f64),
    ));
    let above = (1..=horizon).filter(|&t| ph.h_pfx.eval(t) > h_el.eval(t)).count();
    report.assertions.push(Assertion::check(
        "A7(h)",
        "D_el = i^2, H_el = t^-1/4",
        "times with H_pfx(t) > H_el(t)",
        format!("every t <= {horizon}"),
        Comparator::Eq,
        0.0,
        Provenance::exact("H_pfx divides H_el by sqrt(a) only when a >= 1"),
        above as f64,
    ));
    report.assertions.push(Assertion::check(
        "A7(tau)",
        "D_el = i^2, H_el = t^-1/4",
        "increases of tau(t)/(t H_el(t))",
        grid,
        Comparator::Eq,
        0.0,
        Provenance::stated("nonincreasing"),
        increases(&tau_ratio) as f64,
    ));
    report.tables.push(table);
    Ok(report)
}

/// Log-spaced table of the prefix-wise constructions and the speculation
/// budget for one element-wise profile.
pub fn profile_table(d_el: &DeadlineFn, h_el: &RateFn, horizon: u64) -> Result<Table> {
    let pd = build_prefix_deadline(d_el, h_el, horizon)?;
    let ph = build_prefix_hallucination(|t| pd.tau(t), h_el, horizon)?;
    let budget = crate::schedule::choose_speculation_budget(d_el, h_el, horizon)?;
    let mut table = Table::new("profile", &["n", "d_el", "d_pfx", "c", "h_el", "h_pfx", "tau"]);
    let mut last = 0;
    for k in 0.. {
        let n = 1.3f64.powi(k).ceil() as u64;
        if n > horizon {
            break;
        }
        if n == last {
            continue;
        }
        last = n;
        table.push(vec![
            n.to_string(),
            d_el.eval(n).to_string(),
            pd.d_pfx.eval(n).to_string(),
            budget.eval(n).to_string(),
            h_el.eval(n).to_string(),
            ph.h_pfx.eval(n).to_string(),
            pd.tau(n).to_string(),
        ]);
    }
    Ok(table)
}

pub fn golden_sweep(opts: &PresetOptions) -> Result<PresetReport> {
    let mut report = PresetReport::new("golden", opts);
    let seeds = opts.seed_list(1);
    let mut table = Table::new("sweep", &["alpha", "s", "crossing_index", "crossing_time", "onset_epoch", "onset_time"]);
    for alpha in [0.25, 0.5, 1.0] {
        for s in 1..=3usize {
            let config = GameConfig {
                collection: marker_chain(4),
                target: s,
                adversary: AdversarySpec::Aggressive,
                generator: sbg(alpha / (2.0 * (1.0 + alpha)), BudgetSpec::Auto, Tolerance::Exact),
                deadline: DeadlineSpec::PowerAlpha { alpha },
                horizon: opts.horizon(200_000),
                seed: 0,
                checkpoints: None,
            };
            let scenario = config.scenario()?;
            let budget = scenario.generators.budget().cloned().expect("sbg budget");
            let epochs = scenario.deadline.inverse(config.horizon);
            let onset = (1..=epochs).find(|&m| budget.eval(m) >= s as u64);
            let report_row = run_scenario(&format!("alpha={alpha} s={s}"), config, &seeds, opts)?;
            let crossing = report_row.aggregate.iter().find(|r| r.mu_pfx.mean >= 0.25);
            let opt = |v: Option<u64>| v.map_or_else(String::new, |v| v.to_string());
            table.push(vec![
                alpha.to_string(),
                s.to_string(),
                opt(crossing.map(|r| r.index)),
                opt(crossing.map(|r| r.time)),
                opt(onset),
                opt(onset.map(|m| scenario.deadline.eval(m))),
            ]);
            report.scenarios.push(report_row);
        }
    }
    report.tables.push(table);
    Ok(report)
}
