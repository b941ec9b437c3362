//! Simulator for the timely language generation game.

pub mod adversary;
pub mod config;
pub mod engine;
pub mod error;
pub mod generator;
pub mod harness;
pub mod lang;
pub mod metrics;
pub mod rng;
pub mod schedule;

pub use adversary::{Adversary, StageLog};
pub use config::{GameConfig, RunOutput, Scenario};
pub use engine::{replay_metrics, run_game, Game, GameTrace, RunManifest, TraceRow};
pub use error::{Error, Result};
pub use generator::{Generator, Source, Tolerance};
pub use lang::{Language, LanguageCollection, StringId};
pub use metrics::{Density, Metric, MetricSeries};
pub use schedule::{DeadlineFn, RateFn};
