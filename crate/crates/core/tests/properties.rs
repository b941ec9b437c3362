//! Game-level properties over randomly drawn small configurations.

use std::collections::HashSet;

use genlimit::config::{AdversarySpec, BudgetSpec, CollectionSpec, DeadlineSpec, GameConfig, GeneratorSpec, RateSpec, SpacingKind};
use genlimit::generator::Tolerance;
use genlimit::lang::{BlockGrowth, DEFAULT_BOUND};
use proptest::prelude::*;

fn collection() -> impl Strategy<Value = CollectionSpec> {
    prop_oneof![
        (2u64..5).prop_map(|levels| CollectionSpec::BlockPartition { levels, growth: BlockGrowth::Linear, bound: DEFAULT_BOUND }),
        (2u64..5).prop_map(|levels| CollectionSpec::MarkerInterval {
            levels,
            spacing: SpacingKind::Polynomial,
            base: None,
            power: Some(2),
            bound: DEFAULT_BOUND,
        }),
    ]
}

fn config() -> impl Strategy<Value = GameConfig> {
    (collection(), 0usize..8, any::<bool>(), 0u8..3, 100u64..400, any::<u64>()).prop_map(
        |(collection, target, aggressive, generator, horizon, seed)| {
            let levels = match &collection {
                CollectionSpec::BlockPartition { levels, .. } | CollectionSpec::MarkerInterval { levels, .. } => *levels,
            };
            let (generator, deadline) = match generator {
                0 => (GeneratorSpec::Greedy { tolerance: Tolerance::Exact }, DeadlineSpec::Identity),
                1 => (GeneratorSpec::Gcg { tolerance: Tolerance::Exact }, DeadlineSpec::Identity),
                _ => (
                    GeneratorSpec::Sbg {
                        rate: RateSpec::Power { beta: 1.0 / 6.0 },
                        budget: BudgetSpec::Auto,
                        tolerance: Tolerance::Exact,
                    },
                    DeadlineSpec::Power { num: 3, den: 2 },
                ),
            };
            GameConfig {
                collection,
                target: 1 + target % (levels as usize + 1),
                adversary: if aggressive { AdversarySpec::Aggressive } else { AdversarySpec::Canonical },
                generator,
                deadline,
                horizon,
                seed,
                checkpoints: None,
            }
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn games_respect_rules_and_replay(cfg in config()) {
        let s = cfg.scenario().unwrap();
        let out = s.run().unwrap();
        let trace = &out.trace;
        prop_assert_eq!(trace.horizon(), cfg.horizon);
        let mut used = HashSet::new();
        for r in &trace.rows {
            used.insert(r.x);
            prop_assert!(used.insert(r.o));
            prop_assert_eq!(r.halluc, !s.target.contains(r.o));
        }
        for row in &out.metrics.rows {
            prop_assert!(row.mu_el <= row.mu_pfx);
            prop_assert!(row.mu_pfx <= row.union_density);
        }
        let again = s.run().unwrap();
        prop_assert_eq!(trace.content_hash().unwrap(), again.trace.content_hash().unwrap());
        prop_assert_eq!(&out.metrics, &again.metrics);
    }

    #[test]
    fn config_toml_roundtrip(cfg in config()) {
        let text = cfg.to_toml_string().unwrap();
        prop_assert_eq!(GameConfig::from_toml_str(&text).unwrap(), cfg);
    }
}
