//! `genlimit`: run games, presets and profile constructions.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use genlimit::config::{GameConfig, GeneratorSpec, Scenario};
use genlimit::harness::{self, PresetOptions, PRESETS};
use genlimit::Error;

#[derive(Parser)]
#[command(name = "genlimit", version, about = "Timely language generation game simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Batch {
    /// Number of seeds.
    #[arg(long)]
    seeds: Option<u64>,
    /// Horizon override.
    #[arg(long)]
    horizon: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, env = "GENLIMIT_OUT", default_value = "genlimit-out")]
    out: PathBuf,
    /// Also write full traces.
    #[arg(long)]
    traces: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Play the game described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        batch: Batch,
    },
    /// Run a named preset and check its assertions.
    Preset {
        name: String,
        #[command(flatten)]
        batch: Batch,
        /// Double every horizon and print calibration tails.
        #[arg(long)]
        pilot: bool,
    },
    /// Emit the prefix-wise constructions and speculation budget as CSV.
    Profile {
        /// Config whose deadline and SBG rate define the profile.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        horizon: Option<u64>,
        /// Write `profile.csv` here instead of standard output.
        #[arg(long, env = "GENLIMIT_OUT")]
        out: Option<PathBuf>,
    },
    /// List presets, collection families, adversaries and generators.
    List,
}

enum Failure {
    Assertions,
    Config(String),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::Config(msg)) => Failure::Config(msg.clone()),
            _ => Failure::Internal(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

fn load_config(path: &Path) -> Result<GameConfig, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    GameConfig::from_toml_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn scenario(config: GameConfig, horizon: Option<u64>) -> Result<Scenario, Failure> {
    let mut config = config;
    if let Some(h) = horizon {
        config.horizon = h;
        config.checkpoints = None;
    }
    config.scenario().map_err(|e| Failure::Config(e.to_string()))
}

fn jobs(j: Option<usize>) -> usize {
    j.unwrap_or_else(|| PresetOptions::default().jobs)
}

fn run(config: &Path, batch: &Batch) -> Result<(), Failure> {
    let s = scenario(load_config(config)?, batch.horizon)?;
    let base = s.config.seed;
    let seeds: Vec<u64> = (0..batch.seeds.unwrap_or(1)).map(|k| base + k).collect();
    let runs = harness::run_batch(&s, &seeds, jobs(batch.jobs), true)?;
    for record in runs {
        let dir = if seeds.len() == 1 { batch.out.clone() } else { batch.out.join(format!("seed-{}", record.seed)) };
        let trace = record.trace.expect("traces kept");
        let out = genlimit::config::RunOutput { trace, metrics: record.metrics };
        let seeded = s.with_seed(record.seed);
        let manifest = harness::write_run(&seeded, &out, &dir).with_context(|| format!("writing {}", dir.display()))?;
        let sm = &record.summary;
        println!(
            "seed {}: T={} final i={} mu_el={:.4} mu_pfx={:.4} union={:.4} hallucinations={} sha256={} -> {}",
            record.seed,
            manifest.horizon,
            sm.final_index,
            sm.final_mu_el,
            sm.final_mu_pfx,
            sm.final_union,
            manifest.hallucinations,
            manifest.trace_sha256,
            dir.display()
        );
    }
    Ok(())
}

fn preset(name: &str, batch: &Batch, pilot: bool) -> Result<(), Failure> {
    if !PRESETS.iter().any(|p| p.name.eq_ignore_ascii_case(name)) {
        let known: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        return Err(Failure::Config(format!("unknown preset {name:?}; known: {}", known.join(", "))));
    }
    let opts = PresetOptions {
        seeds: batch.seeds,
        horizon: batch.horizon,
        jobs: jobs(batch.jobs),
        pilot,
        keep_traces: batch.traces,
    };
    let report = harness::run_preset(name, &opts)?;
    let dir = harness::write_preset_report(&report, &batch.out)?;
    for a in &report.assertions {
        println!("{a}");
        if pilot && a.provenance.is_pilot() {
            println!("  pilot tail {} -> threshold {}", a.observed, harness::PILOT_FRACTION * a.observed);
        }
    }
    let failed = report.assertions.iter().filter(|a| !a.passed).count();
    println!("{}: {} assertions, {failed} failed; reports in {}", report.name, report.assertions.len(), dir.display());
    if failed > 0 {
        return Err(Failure::Assertions);
    }
    Ok(())
}

fn profile(config: Option<&Path>, horizon: Option<u64>, out: Option<&Path>) -> Result<(), Failure> {
    let (d, h, default_horizon) = match config {
        Some(path) => {
            let cfg = load_config(path)?;
            let GeneratorSpec::Sbg { rate, .. } = &cfg.generator else {
                return Err(Failure::Config("profile needs an sbg generator with a rate".into()));
            };
            let d = cfg.deadline.build().map_err(|e| Failure::Config(e.to_string()))?;
            let h = rate.build().map_err(|e| Failure::Config(e.to_string()))?;
            (d, h, cfg.horizon)
        }
        None => {
            let (d, h) = harness::construction_profile()?;
            (d, h, 100_000)
        }
    };
    let horizon = horizon.unwrap_or(default_horizon);
    let table = harness::profile_table(&d, &h, horizon).map_err(|e| match e {
        Error::InvalidArgument(msg) => Failure::Config(msg),
        other => other.into(),
    })?;
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).context("creating output directory")?;
            let path = dir.join("profile.csv");
            table.write_csv(fs::File::create(&path).context("creating profile.csv")?)?;
            eprintln!("{} rows ({}, {}) -> {}", table.rows.len(), d.describe(), h.describe(), path.display());
        }
        None => table.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn list() {
    println!("presets:");
    for p in PRESETS {
        println!("  {:<7} {}", p.name, p.description);
    }
    println!("collection families:\n  block_partition  (growth = dyadic | linear)\n  marker_interval  (spacing = geometric | polynomial)");
    println!("adversaries:\n  canonical\n  aggressive\n  partial\n  contaminated\n  staged_chain");
    println!("generators:\n  greedy\n  gcg\n  sbg");
    println!("deadlines:\n  identity\n  linear\n  power\n  power_alpha\n  table");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, batch } => run(config, batch),
        Command::Preset { name, batch, pilot } => preset(name, batch, *pilot),
        Command::Profile { config, horizon, out } => profile(config.as_deref(), *horizon, out.as_deref()),
        Command::List => {
            list();
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assertions) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("genlimit: bad config: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("genlimit: {e:#}");
            ExitCode::from(3)
        }
    }
}
