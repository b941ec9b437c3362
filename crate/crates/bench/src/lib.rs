//! Shared fixtures for the benchmarks.

use genlimit::{GameConfig, Scenario};

pub const SBG_GAME: &str = r#"
target = 3
horizon = 100000
seed = 1

[collection]
family = "marker_interval"
levels = 4
spacing = "polynomial"
power = 2

[adversary]
kind = "aggressive"

[generator]
kind = "sbg"
rate = { kind = "power", beta = 0.1666666 }

[deadline]
kind = "power"
num = 3
den = 2
"#;

pub const GREEDY_GAME: &str = r#"
target = 3
horizon = 100000
seed = 1

[collection]
family = "block_partition"
levels = 4
growth = "linear"

[adversary]
kind = "canonical"

[generator]
kind = "greedy"

[deadline]
kind = "identity"
"#;

pub fn scenario(toml: &str) -> Scenario {
    GameConfig::from_toml_str(toml).unwrap().scenario().unwrap()
}
