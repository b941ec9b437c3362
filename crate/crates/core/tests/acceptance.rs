//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::{Arc, OnceLock};
use std::time::{Duration, Instant};

use genlimit::harness::{self, Assertion, PresetOptions, PresetReport};
use genlimit::lang::{
    make_block_partition_chain, make_marker_interval_chain, plain_prefix_density, Language, PredicateLanguage,
    StringId,
};
use genlimit::metrics::{Density, MetricSeries};
use genlimit::schedule::DeadlineFn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Outcome = Result<String, String>;

fn opts() -> PresetOptions {
    PresetOptions { keep_traces: false, ..PresetOptions::default() }
}

fn e3() -> &'static PresetReport {
    static CELL: OnceLock<PresetReport> = OnceLock::new();
    CELL.get_or_init(|| harness::e3_sbg_density(&opts()).expect("E3 runs"))
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn all_pass<'a>(asserts: impl IntoIterator<Item = &'a Assertion>) -> Result<usize, String> {
    let asserts: Vec<&Assertion> = asserts.into_iter().collect();
    ensure(!asserts.is_empty(), "no assertions recorded")?;
    let failed: Vec<String> = asserts.iter().filter(|a| !a.passed).map(|a| a.to_string()).collect();
    ensure(failed.is_empty(), failed.join("; "))?;
    Ok(asserts.len())
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    ensure(elapsed < Duration::from_secs(limit_secs), format!("took {elapsed:.2?}, limit {limit_secs}s"))
}

/// Direct evaluation of both densities from their definitions.
fn oracle_densities(o: &[u64], k_sorted: &[u64], d: impl Fn(u64) -> u64, i: u64) -> (Density, Density) {
    let generated_by = |t: u64, x: u64| o.iter().take(t as usize).any(|&y| y == x);
    let el = (1..=i).filter(|&j| generated_by(d(j), k_sorted[j as usize - 1])).count() as u64;
    let pfx = (1..=i).filter(|&j| generated_by(d(i), k_sorted[j as usize - 1])).count() as u64;
    (Density::new(el, i), Density::new(pfx, i))
}

fn random_deadline(rng: &mut ChaCha20Rng) -> (DeadlineFn, Box<dyn Fn(u64) -> u64>) {
    match rng.random_range(0..3) {
        0 => (DeadlineFn::Identity, Box::new(|i| i)),
        1 => {
            let c = rng.random_range(1..4u64);
            (DeadlineFn::linear(c).unwrap(), Box::new(move |i| c * i))
        }
        _ => (DeadlineFn::power(2, 1).unwrap(), Box::new(|i| i * i)),
    }
}

fn finite_target(rng: &mut ChaCha20Rng, universe: u64) -> (Arc<dyn Language>, Vec<u64>) {
    let members: Vec<u64> = (0..universe).filter(|_| rng.random_bool(0.6)).collect();
    let set: HashSet<u64> = members.iter().copied().collect();
    let k = PredicateLanguage::new("finite", 0, move |x| set.contains(&x)).with_bound(universe - 1);
    (Arc::new(k), members)
}

fn a1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha20Rng::seed_from_u64(0xA1);
    let mut compared = 0;
    let mut traces = 0;
    while traces < 1000 {
        let universe = rng.random_range(2..=50u64);
        let (k, members) = finite_target(&mut rng, universe);
        if members.is_empty() {
            continue;
        }
        traces += 1;
        let (d, dd) = random_deadline(&mut rng);
        let max_i = rng.random_range(1..=members.len().min(30) as u64);
        let horizon = dd(max_i) + rng.random_range(0..4);
        let o: Vec<u64> = (0..horizon).map(|_| rng.random_range(0..universe)).collect();
        let x: Vec<u64> = (0..horizon).map(|_| rng.random_range(0..universe)).collect();
        let ids = |v: &[u64]| v.iter().copied().map(StringId).collect::<Vec<_>>();
        let checkpoints: Vec<u64> = (1..=max_i).collect();
        let series = MetricSeries::compute(&ids(&o), &ids(&x), k.as_ref(), &d, &checkpoints).map_err(|e| e.to_string())?;
        for row in &series.rows {
            let (el, pfx) = oracle_densities(&o, &members, &dd, row.index);
            ensure(
                (row.mu_el.hits, row.mu_el.of) == (el.hits, el.of) && (row.mu_pfx.hits, row.mu_pfx.of) == (pfx.hits, pfx.of),
                format!("trace {traces} index {}: {:?}/{:?} vs oracle {el:?}/{pfx:?}", row.index, row.mu_el, row.mu_pfx),
            )?;
            compared += 1;
        }
    }
    within(start.elapsed(), 10)?;
    let routes = harness::e1_metric_routes(&opts()).map_err(|e| e.to_string())?;
    all_pass(routes.criterion("A1"))?;
    Ok(format!("1000 traces, {compared} checkpoint rows equal to the direct evaluator, {:.2?}", start.elapsed()))
}

fn a2() -> Outcome {
    let start = Instant::now();
    let blocks = make_block_partition_chain(3).map_err(|e| e.to_string())?;
    let markers = make_marker_interval_chain(2, 3).map_err(|e| e.to_string())?;
    let block_member = |j: u64, x: u64| x >= 1 && (x < 1 << (j + 1) || x.is_power_of_two());
    let marker_member = |j: u64, x: u64| {
        (0..64).map(|i| if i == 0 { 0 } else { 1u64 << i }).take_while(|&a| a <= x).any(|a| x <= a + j)
    };
    let mut at_20 = Vec::new();
    for j in 1..=3u64 {
        let (lb, lm) = (blocks.language(j as usize).unwrap(), markers.language(j as usize).unwrap());
        let (inf_b, inf_m) = (blocks.limit().unwrap(), markers.limit().unwrap());
        let (mut prev_b, mut prev_m) = (f64::INFINITY, f64::INFINITY);
        for k in 6..=20u64 {
            let n = 1u64 << k;
            let db = plain_prefix_density(lb.as_ref(), inf_b.as_ref(), n).map_err(|e| e.to_string())?;
            let closed = (1 << (j + 1)) - 1 + (k - j);
            let brute = (1..=n).filter(|&x| block_member(j, x)).count() as u64;
            ensure(db.hits == closed && brute == closed, format!("block L^{j} at 2^{k}: {} vs {closed}/{brute}", db.hits))?;
            ensure(db.to_f64() < prev_b, format!("block L^{j} density did not drop at k={k}"))?;
            prev_b = db.to_f64();
            let dm = plain_prefix_density(lm.as_ref(), inf_m.as_ref(), n).map_err(|e| e.to_string())?;
            let brute = (0..n).filter(|&x| marker_member(j, x)).count() as u64;
            ensure(dm.hits == brute, format!("marker L^{j} at 2^{k}: {} vs {brute}", dm.hits))?;
            ensure(dm.hits <= (j + 1) * (k + 2), format!("marker L^{j} exceeds (j+1)log bound at 2^{k}"))?;
            ensure(dm.to_f64() < prev_m, format!("marker L^{j} density did not drop at k={k}"))?;
            prev_m = dm.to_f64();
        }
        ensure(prev_b <= 1e-3, format!("block L^{j} density {prev_b} at 2^20"))?;
        at_20.push(prev_b);
    }
    ensure((at_20[0] - 2.1e-5).abs() < 1e-6, format!("L^1 density at 2^20 is {}", at_20[0]))?;
    let preset = harness::e2_chain_decay(&opts()).map_err(|e| e.to_string())?;
    all_pass(&preset.assertions)?;
    within(start.elapsed(), 5)?;
    Ok(format!("block densities at 2^20: {at_20:?}; marker counts within (j+1)(log2 n + 2), {:.2?}", start.elapsed()))
}

fn a3() -> Outcome {
    let r = e3();
    let n = all_pass(r.criterion("A3"))?;
    let main = r.scenario("marker_l3").ok_or("missing scenario")?;
    ensure(main.runs.len() == 10 && main.config.horizon == 1_000_000, "expected 10 seeds at T = 10^6")?;
    let bound = r.criterion("A3(ii)").next().unwrap().threshold;
    ensure((bound - 0.1).abs() < 1e-12, format!("H(T) = {bound}, expected 0.1"))?;
    let pfx = r.criterion("A3(i)").next().unwrap();
    Ok(format!("{n} assertions; mean final mu_pfx {:.4} >= {:.4}", pfx.observed, pfx.threshold))
}

/// `⌈i^{6/5}⌉` in exact integer arithmetic.
fn d_six_fifths(i: u64) -> u64 {
    let target = u128::from(i).pow(6);
    let mut t = (i as f64).powf(1.2) as u64;
    while u128::from(t).pow(5) >= target && t > 0 {
        t -= 1;
    }
    while u128::from(t).pow(5) < target {
        t += 1;
    }
    t
}

fn a4() -> Outcome {
    let o = PresetOptions { keep_traces: true, ..opts() };
    let a = harness::e4a_staged_greedy(&o).map_err(|e| e.to_string())?;
    let n = all_pass(a.criterion("A4"))?;
    let run = &a.scenarios[0].runs[0];
    let trace = run.trace.as_ref().ok_or("trace not kept")?;
    let stages: Vec<_> = run.stage_log.as_ref().ok_or("no stage log")?.completed().cloned().collect();
    ensure(stages.len() >= 3, format!("only {} completed stages", stages.len()))?;
    for s in &stages {
        let t = d_six_fifths(s.i);
        let hits: HashSet<u64> = trace.rows[..t as usize].iter().map(|r| r.o.0).filter(|&y| (1..=s.i).contains(&y)).collect();
        let pfx = hits.len() as f64 / s.i as f64;
        ensure(pfx <= 0.5f64.powi(s.j as i32), format!("stage {}: recounted mu_pfx {pfx}", s.j))?;
        let row = run.metrics.rows.iter().find(|r| r.index == s.i).ok_or("stage index not a checkpoint")?;
        ensure(row.mu_pfx.hits == hits.len() as u64, format!("stage {}: recount {} vs {}", s.j, hits.len(), row.mu_pfx.hits))?;
    }
    let b = harness::e4b_staged_sbg(&opts()).map_err(|e| e.to_string())?;
    let nb = all_pass(&b.assertions)?;
    Ok(format!("{} greedy stages, {n} + {nb} assertions; recounted mu_pfx <= 2^-j at every stage", stages.len()))
}

fn a5() -> Outcome {
    let r = harness::e5_gcg_upper(&opts()).map_err(|e| e.to_string())?;
    let n = all_pass(&r.assertions)?;
    let canon = r.scenario("canonical").ok_or("missing scenario")?;
    ensure(canon.config.horizon == 100_000 && canon.config.target == 4, "expected L^4 at T = 10^5")?;
    let run = &canon.runs[0];
    let upper = run.metrics.rows.iter().map(|r| r.mu_el.to_f64()).fold(0.0, f64::max);
    Ok(format!("{n} assertions; max mu_el over checkpoints {upper:.4}, late hallucinations {}", run.late_hallucinations))
}

fn a6() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(0xA6);
    let mut rows = 0;
    for inst in 0..10_000 {
        let universe = rng.random_range(2..=40u64);
        let (k, members) = finite_target(&mut rng, universe);
        if members.is_empty() {
            continue;
        }
        let (d, dd) = random_deadline(&mut rng);
        let max_i = rng.random_range(1..=members.len() as u64);
        let o: Vec<StringId> = (0..dd(max_i)).map(|_| StringId(rng.random_range(0..universe))).collect();
        let checkpoints: Vec<u64> = (1..=max_i).collect();
        let series = MetricSeries::compute(&o, &o, k.as_ref(), &d, &checkpoints).map_err(|e| e.to_string())?;
        for r in &series.rows {
            ensure(r.mu_el <= r.mu_pfx, format!("instance {inst} index {}: {:?} > {:?}", r.index, r.mu_el, r.mu_pfx))?;
            rows += 1;
        }
    }
    let routes = harness::e1_metric_routes(&opts()).map_err(|e| e.to_string())?;
    all_pass(routes.criterion("A6"))?;
    Ok(format!("10000 instances, {rows} checkpoint rows, zero violations"))
}

fn a7() -> Outcome {
    let start = Instant::now();
    let r = harness::e7_constructions(&opts()).map_err(|e| e.to_string())?;
    let n = all_pass(&r.assertions)?;
    within(start.elapsed(), 10)?;
    Ok(format!("{n} assertions, {:.2?}", start.elapsed()))
}

fn a8() -> Outcome {
    let r = e3();
    let n = all_pass(r.criterion("A8"))?;
    let fin = r.criterion("A8").last().unwrap().observed;
    Ok(format!("{n} assertions; final mean union density {fin:.4}"))
}

fn a9() -> Outcome {
    let r = harness::e6_data_models(&opts()).map_err(|e| e.to_string())?;
    let n = all_pass(&r.assertions)?;
    let pfx: Vec<String> = r
        .assertions
        .iter()
        .filter(|a| a.provenance.is_pilot())
        .map(|a| format!("{} {:.4} >= {:.4}", a.scenario, a.observed, a.threshold))
        .collect();
    Ok(format!("{n} assertions; {}", pfx.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] =
        [("A1", a1), ("A2", a2), ("A3", a3), ("A4", a4), ("A5", a5), ("A6", a6), ("A7", a7), ("A8", a8), ("A9", a9)];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    panic::set_hook(Box::new(|_| {}));
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("{name} PASS: {detail}"),
            Err(why) => {
                failed += 1;
                println!("{name} FAIL: {why}");
            }
        }
    }
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
