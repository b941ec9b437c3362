use std::fs;
use std::process::{Command, Output};

fn genlimit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genlimit")).args(args).env_remove("GENLIMIT_OUT").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const CONFIG: &str = r#"
target = 2
horizon = 500
seed = 7

[collection]
family = "block_partition"
levels = 3
growth = "linear"

[adversary]
kind = "canonical"

[generator]
kind = "greedy"

[deadline]
kind = "identity"
"#;

#[test]
fn list_names_presets() {
    let o = genlimit(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for p in ["E1", "E2", "E3", "E4a", "E4b", "E5", "E6", "E7", "golden", "block_partition", "sbg"] {
        assert!(text.contains(p), "{p}");
    }
}

#[test]
fn preset_e1_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = genlimit(&["preset", "E1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("E1/assertions.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn failed_assertions_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = genlimit(&["preset", "E4a", "--horizon", "200", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL A4"));
}

#[test]
fn bad_configs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "target = [").unwrap();
    let o = genlimit(&["run", "--config", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let wrong = dir.path().join("wrong.toml");
    fs::write(&wrong, CONFIG.replace("target = 2", "target = 40")).unwrap();
    let o = genlimit(&["run", "--config", wrong.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let missing = genlimit(&["run", "--config", "/nonexistent/x.toml"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(genlimit(&["preset", "E99"]).status.code(), Some(2));
}

#[test]
fn run_writes_trace_metrics_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("game.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let out = dir.path().join("out");
    let o = genlimit(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,x,o,source,halluc,flag\n"));
    assert_eq!(trace.lines().count(), 501);
    let metrics = fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("index,time,mu_el,mu_pfx,halluc_count,halluc_rate,union_density\n"));
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 7);
    assert_eq!(manifest["trace_sha256"].as_str().unwrap().len(), 64);

    let again = dir.path().join("again");
    genlimit(&["run", "--config", cfg.to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert_eq!(trace, fs::read_to_string(again.join("trace.csv")).unwrap());
}

#[test]
fn seeds_and_env_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("game.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let env_out = dir.path().join("env");
    let o = Command::new(env!("CARGO_BIN_EXE_genlimit"))
        .args(["run", "--config", cfg.to_str().unwrap(), "--seeds", "2", "--horizon", "100"])
        .env("GENLIMIT_OUT", &env_out)
        .output()
        .unwrap();
    assert!(o.status.success());
    for seed in [7, 8] {
        let trace = fs::read_to_string(env_out.join(format!("seed-{seed}/trace.csv"))).unwrap();
        assert_eq!(trace.lines().count(), 101);
    }
}

#[test]
fn profile_emits_csv() {
    let o = genlimit(&["profile", "--horizon", "2000"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("n,d_el,d_pfx,c,h_el,h_pfx,tau\n1,1,"));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("game.toml");
    fs::write(&cfg, CONFIG).unwrap();
    let o = genlimit(&["profile", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
