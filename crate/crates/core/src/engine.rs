//! The turn-taking game loop and trace replay.

use std::io::{Read, Write};
use std::sync::Arc;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::adversary::{Adversary, StageLog};
use crate::error::{invalid, Error, Result};
use crate::generator::{Generator, GeneratorStats, Source, StepContext};
use crate::lang::{Language, StringId, UsedSet};
use crate::metrics::MetricSeries;
use crate::schedule::DeadlineFn;

/// One step of a game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRow {
    pub x: StringId,
    pub o: StringId,
    pub source: Source,
    /// `o ∉ K`.
    pub halluc: bool,
    /// The generator took a fallback path.
    pub flag: bool,
}

/// Rows are indexed by time: `rows[t-1]` is step `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct GameTrace {
    pub rows: Vec<TraceRow>,
    pub stage_log: Option<StageLog>,
    pub stats: GeneratorStats,
}

impl GameTrace {
    pub fn horizon(&self) -> u64 {
        self.rows.len() as u64
    }

    pub fn outputs(&self) -> Vec<StringId> {
        self.rows.iter().map(|r| r.o).collect()
    }

    pub fn observations(&self) -> Vec<StringId> {
        self.rows.iter().map(|r| r.x).collect()
    }

    pub fn hallucinations(&self) -> u64 {
        self.rows.iter().filter(|r| r.halluc).count() as u64
    }

    pub fn count_source(&self, source: Source) -> u64 {
        self.rows.iter().filter(|r| r.source == source).count() as u64
    }

    /// Columns `t, x, o, source, halluc, flag`.
    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x", "o", "source", "halluc", "flag"])?;
        for (k, r) in self.rows.iter().enumerate() {
            w.write_record([
                (k + 1).to_string(),
                r.x.to_string(),
                r.o.to_string(),
                r.source.as_str().to_string(),
                u8::from(r.halluc).to_string(),
                u8::from(r.flag).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a trace written by [`GameTrace::write_csv`].
    pub fn read_csv(input: impl Read) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut rows = Vec::new();
        for (k, rec) in r.records().enumerate() {
            let rec = rec?;
            let field = |n: usize| rec.get(n).ok_or_else(|| invalid(format!("trace row {} has too few columns", k + 1)));
            let num = |n: usize| -> Result<u64> {
                field(n)?.parse::<u64>().map_err(|e| invalid(format!("trace row {}: {e}", k + 1)))
            };
            if num(0)? != k as u64 + 1 {
                return Err(invalid(format!("trace row {} is out of order", k + 1)));
            }
            rows.push(TraceRow {
                x: StringId(num(1)?),
                o: StringId(num(2)?),
                source: field(3)?.parse().map_err(invalid)?,
                halluc: num(4)? == 1,
                flag: num(5)? == 1,
            });
        }
        Ok(Self { rows, stage_log: None, stats: GeneratorStats::default() })
    }

    /// SHA-256 of the CSV rendering, hex encoded.
    pub fn content_hash(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(Sha256::digest(&buf).iter().map(|b| format!("{b:02x}")).collect())
    }
}

/// A fully built game ready to play.
pub struct Game {
    pub target: Arc<dyn Language>,
    pub adversary: Box<dyn Adversary>,
    pub generator: Box<dyn Generator>,
    pub horizon: u64,
}

/// Plays `horizon` steps: the adversary emits `x_t`, then the generator
/// answers `o_t`, which must be new.
pub fn run_game(game: Game) -> Result<GameTrace> {
    let Game { target, mut adversary, mut generator, horizon } = game;
    let mut used = UsedSet::new();
    let mut rows = Vec::with_capacity(horizon as usize);
    for t in 1..=horizon {
        let x = adversary.emit(t, &used)?;
        used.insert(x);
        let mv = generator.step(&StepContext { t, observation: x, used: &used })?;
        if !used.insert(mv.output) {
            return Err(Error::EngineInvariant {
                t,
                detail: format!("{} output {} was already observed or output", generator.name(), mv.output),
            });
        }
        rows.push(TraceRow { x, o: mv.output, source: mv.source, halluc: !target.contains(mv.output), flag: mv.flag });
    }
    Ok(GameTrace { rows, stage_log: adversary.stage_log(), stats: generator.stats() })
}

/// Metric series of a trace. Also rechecks every hallucination flag.
pub fn replay_metrics(trace: &GameTrace, k: &dyn Language, d: &DeadlineFn, checkpoints: &[u64]) -> Result<MetricSeries> {
    if let Some((n, _)) = trace.rows.iter().enumerate().find(|(_, r)| r.halluc == k.contains(r.o)) {
        return Err(Error::EngineInvariant { t: n as u64 + 1, detail: "hallucination flag disagrees with target membership".into() });
    }
    MetricSeries::compute(&trace.outputs(), &trace.observations(), k, d, checkpoints)
}

/// Echo of a run's configuration with the trace hash.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config: serde_json::Value,
    pub horizon: u64,
    pub trace_sha256: String,
    pub hallucinations: u64,
    pub stats: GeneratorStats,
}

impl RunManifest {
    pub fn new(config: serde_json::Value, trace: &GameTrace) -> Result<Self> {
        Ok(Self {
            config,
            horizon: trace.horizon(),
            trace_sha256: trace.content_hash()?,
            hallucinations: trace.hallucinations(),
            stats: trace.stats,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{Aggressive, Canonical};
    use crate::generator::{Greedy, Move, Tolerance};
    use crate::lang::{make_block_partition_chain_with, BlockGrowth, LanguageCollection, Naturals, DEFAULT_BOUND};

    fn naturals_collection() -> Arc<LanguageCollection> {
        Arc::new(LanguageCollection::chain("naturals", vec![Arc::new(Naturals::new(1)) as Arc<dyn Language>]).unwrap())
    }

    fn greedy_game(adversary: Box<dyn Adversary>, horizon: u64) -> Game {
        let c = naturals_collection();
        Game {
            target: c.language(1).unwrap().clone(),
            adversary,
            generator: Box::new(Greedy::new(c, Tolerance::Exact)),
            horizon,
        }
    }

    #[test]
    fn canonical_observations() {
        let k: Arc<dyn Language> = Arc::new(Naturals::new(1));
        let trace = run_game(greedy_game(Box::new(Canonical::new(k)), 3)).unwrap();
        assert_eq!(trace.observations(), vec![StringId(1), StringId(2), StringId(3)]);
        assert_eq!(trace.horizon(), 3);
    }

    #[test]
    fn aggressive_alternation_covers_prefix() {
        let k: Arc<dyn Language> = Arc::new(Naturals::new(1));
        let trace = run_game(greedy_game(Box::new(Aggressive::new(k)), 100)).unwrap();
        let mut all: Vec<u64> = trace.rows.iter().flat_map(|r| [r.x.0, r.o.0]).collect();
        all.sort_unstable();
        all.dedup();
        assert!((1..=100).all(|v| all.binary_search(&v).is_ok()));
    }

    #[test]
    fn runs_are_deterministic() {
        let chain = Arc::new(make_block_partition_chain_with(BlockGrowth::Linear, 3, DEFAULT_BOUND).unwrap());
        let play = || {
            let k = chain.language(2).unwrap().clone();
            run_game(Game {
                target: k.clone(),
                adversary: Box::new(Canonical::new(k)),
                generator: Box::new(Greedy::new(chain.clone(), Tolerance::Exact)),
                horizon: 500,
            })
            .unwrap()
        };
        let (a, b) = (play(), play());
        assert_eq!(a, b);
        assert_eq!(a.content_hash().unwrap(), b.content_hash().unwrap());
    }

    #[derive(Debug)]
    struct Repeater;

    impl Generator for Repeater {
        fn step(&mut self, _ctx: &StepContext<'_>) -> Result<Move> {
            Ok(Move { output: StringId(1), source: Source::Guesser, flag: false })
        }
        fn current_guess(&self) -> Option<usize> {
            None
        }
        fn stats(&self) -> GeneratorStats {
            GeneratorStats::default()
        }
        fn name(&self) -> &'static str {
            "repeater"
        }
    }

    #[test]
    fn repeats_are_hard_failures() {
        let k: Arc<dyn Language> = Arc::new(Naturals::new(1));
        let game = Game { target: k.clone(), adversary: Box::new(Canonical::new(k)), generator: Box::new(Repeater), horizon: 5 };
        assert!(matches!(run_game(game), Err(Error::EngineInvariant { t: 1, .. })));
    }

    #[test]
    fn csv_roundtrip_and_replay() {
        let k: Arc<dyn Language> = Arc::new(Naturals::new(1));
        let trace = run_game(greedy_game(Box::new(Canonical::new(k.clone())), 50)).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,x,o,source,halluc,flag\n1,1,2,guesser,0,0\n"));
        let back = GameTrace::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.rows, trace.rows);
        let cps = [1, 5, 10, 25];
        let a = replay_metrics(&trace, k.as_ref(), &DeadlineFn::Identity, &cps).unwrap();
        let b = replay_metrics(&back, k.as_ref(), &DeadlineFn::Identity, &cps).unwrap();
        assert_eq!(a, b);
        assert!(a.rows.iter().all(|r| r.mu_el <= r.mu_pfx));
        assert!(replay_metrics(&trace, k.as_ref(), &DeadlineFn::Identity, &[51]).is_err());
        let mut forged = trace.clone();
        forged.rows[3].halluc = true;
        assert!(replay_metrics(&forged, k.as_ref(), &DeadlineFn::Identity, &cps).is_err());
    }
}
