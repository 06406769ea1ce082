use std::fs;
use std::path::Path;
use std::process::Command;

use moment_witness_cli::{sidecar_path, CliError, EXIT_CONFIG, EXIT_NUMERICAL, THREADS_ENV};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_moment-witness"))
}

fn run(out: &Path, args: &[&str]) -> std::process::Output {
    binary().arg("--out").arg(out).args(args).output().unwrap()
}

#[test]
fn missing_seed_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let res = run(&out, &["--command", "instability"]);
    assert_eq!(res.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&res.stderr).contains("--seed"));
    assert!(!out.exists());
}

#[test]
fn bad_inputs_exit_with_configuration_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    for args in [
        vec!["--command", "nonsense", "--seed", "1"],
        vec!["--command", "instability", "--seed", "1", "--activations", "swish2"],
        vec!["--command", "counterexample", "--seed", "1", "--kind", "pigeonhole", "--d", "2"],
        vec!["--command", "bilipschitz", "--seed", "1", "--n", "40"],
        vec!["--command", "witness-verify", "--seed", "1", "--measure1", "/nonexistent", "--measure2", "/nonexistent"],
    ] {
        let res = run(&out, &args);
        assert_eq!(res.status.code(), Some(EXIT_CONFIG), "{args:?}");
    }
}

#[test]
fn numerical_failures_map_to_their_own_code() {
    let e = moment_witness::Error::SearchFailed {
        what: "linear region",
        attempts: 1,
    };
    assert_eq!(CliError::from(e).exit_code(), EXIT_NUMERICAL);
    let e = moment_witness::Error::Precondition("x".into());
    assert_eq!(CliError::from(e).exit_code(), EXIT_CONFIG);
}

#[test]
fn sidecar_echoes_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("inst.csv");
    let res = run(&out, &["--command", "instability", "--seed", "5"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let body = fs::read_to_string(&out).unwrap();
    assert!(body.starts_with("eps,ratio\n"));
    assert_eq!(body.lines().count(), 5);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(sidecar_path(&out)).unwrap()).unwrap();
    assert_eq!(meta["config"]["seed"], 5);
    assert_eq!(meta["config"]["params"]["command"], "instability");
    assert!(meta["summary"]["loglog_slope"].is_f64());
    assert_eq!(meta["version"], moment_witness::VERSION);
}

#[test]
fn thread_cap_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--command", "bilipschitz", "--seed", "2", "--n", "3", "--d", "2", "--instances", "100"];
    let mut bodies = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("t{threads}.csv"));
        let res = binary().env(THREADS_ENV, threads).arg("--out").arg(&out).args(args).output().unwrap();
        assert!(res.status.success());
        bodies.push(fs::read(&out).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);

    let out = dir.path().join("bad.csv");
    let res = binary().env(THREADS_ENV, "0").arg("--out").arg(&out).args(args).output().unwrap();
    assert_eq!(res.status.code(), Some(EXIT_CONFIG));
}

#[test]
fn counterexample_output_is_a_json_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ce.jsonl");
    let res = run(&out, &["--command", "counterexample", "--seed", "3", "--d", "3"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let line = fs::read_to_string(&out).unwrap();
    let v: serde_json::Value = serde_json::from_str(line.trim_end()).unwrap();
    assert_eq!(v["kind"], "set-split");
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(sidecar_path(&out)).unwrap()).unwrap();
    assert_eq!(meta["summary"]["measures_equal"], false);
    assert_eq!(meta["summary"]["region_verified"], true);
}
