use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{Assertion, PresetReport, ScenarioReport};
use crate::config::{RunOutput, Scenario};
use crate::engine::RunManifest;
use crate::error::Result;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(create(path)?, value)?;
    Ok(())
}

fn write_aggregate(path: &Path, s: &ScenarioReport) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    let mut header = vec!["index".to_string(), "time".to_string()];
    for m in ["mu_el", "mu_pfx", "halluc_rate", "union_density"] {
        for stat in ["mean", "min", "max"] {
            header.push(format!("{m}_{stat}"));
        }
    }
    w.write_record(&header)?;
    for r in &s.aggregate {
        let mut row = vec![r.index.to_string(), r.time.to_string()];
        for st in [r.mu_el, r.mu_pfx, r.halluc_rate, r.union_density] {
            row.extend([st.mean.to_string(), st.min.to_string(), st.max.to_string()]);
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct AssertionReport<'a> {
    preset: &'a str,
    pilot: bool,
    passed: bool,
    assertions: &'a [Assertion],
}

/// Writes `<dir>/<preset>/`: `summary.json`, `assertions.json`, one CSV per
/// table and, per scenario, `aggregate.csv` plus per-seed metrics, stage
/// logs and (when kept) traces. Returns the preset directory.
pub fn write_preset_report(report: &PresetReport, dir: &Path) -> Result<PathBuf> {
    let root = dir.join(&report.name);
    write_json(&root.join("summary.json"), report)?;
    write_json(
        &root.join("assertions.json"),
        &AssertionReport { preset: &report.name, pilot: report.pilot, passed: report.passed(), assertions: &report.assertions },
    )?;
    for t in &report.tables {
        t.write_csv(create(&root.join(format!("{}.csv", t.name)))?)?;
    }
    for s in &report.scenarios {
        let sdir = root.join(&s.label);
        write_aggregate(&sdir.join("aggregate.csv"), s)?;
        for run in &s.runs {
            run.metrics.write_csv(create(&sdir.join(format!("seed-{}.metrics.csv", run.seed)))?)?;
            if let Some(log) = &run.stage_log {
                log.write_csv(create(&sdir.join(format!("seed-{}.stages.csv", run.seed)))?)?;
            }
            if let Some(trace) = &run.trace {
                trace.write_csv(create(&sdir.join(format!("seed-{}.trace.csv", run.seed)))?)?;
            }
        }
    }
    Ok(root)
}

/// Writes `trace.csv`, `metrics.csv`, `manifest.json` and, for staged
/// runs, `stages.csv` into `dir`.
pub fn write_run(scenario: &Scenario, out: &RunOutput, dir: &Path) -> Result<RunManifest> {
    out.trace.write_csv(create(&dir.join("trace.csv"))?)?;
    out.metrics.write_csv(create(&dir.join("metrics.csv"))?)?;
    if let Some(log) = &out.trace.stage_log {
        log.write_csv(create(&dir.join("stages.csv"))?)?;
    }
    let manifest = RunManifest::new(scenario.config.to_json()?, &out.trace)?;
    write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}
