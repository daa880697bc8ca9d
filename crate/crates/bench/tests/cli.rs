use std::path::PathBuf;
use std::process::{Command, Output};

fn ppsnd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppsnd")).args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ppsnd-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../sim/scenarios")
}

#[test]
fn bench_then_summarize() {
    let out = scratch("snd.csv");
    let o = ppsnd(&["bench", "--protocol", "snd", "--bits", "1024", "--trials", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 7);
    let o = ppsnd(&["summarize", "--in", out.to_str().unwrap()]);
    assert!(o.status.success());
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("initiator") && table.contains("responder"));
    let summary = std::fs::read_to_string(scratch("snd.csv.summary.csv")).unwrap();
    assert!(summary.starts_with("protocol,role,key_bits,n,mean_ms,ci95_low_ms,ci95_high_ms\n"));
}

#[test]
fn unsupported_key_size_is_a_config_error() {
    let o = ppsnd(&["bench", "--protocol", "ppsnd", "--bits", "1536", "--trials", "1", "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_arguments_are_config_errors() {
    assert_eq!(ppsnd(&["bench", "--protocol", "nope", "--out", "x"]).status.code(), Some(2));
    assert_eq!(ppsnd(&["summarize", "--in", "/nonexistent/records.csv"]).status.code(), Some(2));
}

#[test]
fn simulate_writes_a_trace() {
    let trace = scratch("honest.jsonl");
    let o = ppsnd(&[
        "simulate",
        "--scenario",
        scenarios().join("honest_pair.toml").to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("Neighbor") && stdout.contains("trace sha256"));
    assert!(std::fs::read_to_string(&trace).unwrap().lines().count() > 6);
}

#[test]
fn exhausted_event_budget_is_a_sim_error() {
    let src = std::fs::read_to_string(scenarios().join("honest_pair.toml")).unwrap();
    let path = scratch("tiny_budget.toml");
    std::fs::write(&path, src.replace("seed = 1\n", "seed = 1\nevent_budget = 2\n")).unwrap();
    let o = ppsnd(&["simulate", "--scenario", path.to_str().unwrap(), "--trace", scratch("t.jsonl").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}
