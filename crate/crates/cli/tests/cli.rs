use std::process::{Command, Output};

use ctsim::circuit::parse_circuit;

fn ctsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctsim")).args(args).env_remove("CT_DIM_CAP").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = ctsim(&["verify", "--protocol", "ct-controlled", "--d", "2", "--n", "1", "--seed", "7", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 1);
    assert!(stdout(&o).starts_with("PASS ct-controlled d=2 n=1 seed=7 branches=4"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["branch_count"], 4);
    assert_eq!(report["ledger"]["edits"], 1);
    assert_eq!(report["ledger"]["total_cdits"], 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&ctsim(&["verify", "--protocol", "ct-controlled", "--d", "1", "--n", "1"])), 2);
    assert_eq!(code(&ctsim(&["verify", "--protocol", "teleport-everything"])), 2);
    assert_eq!(code(&ctsim(&["verify", "--bogus"])), 2);
    assert_eq!(code(&ctsim(&["sweep", "--d", "1,2"])), 2);
    assert_eq!(code(&ctsim(&["verify", "--protocol", "toffoli", "--d", "3"])), 2);
    assert_eq!(code(&ctsim(&[])), 2);
}

#[test]
fn sweep_csv_has_twelve_rows() {
    let o = ctsim(&["sweep", "--protocol", "ct-controlled", "--d", "2,3", "--n", "1,2", "--seeds", "3", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 13);
    assert_eq!(lines[0], "protocol,d,n,seed,branches,max_dev,pass");
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
}

#[test]
fn output_is_deterministic() {
    let args = ["sweep", "--protocol", "ct-x", "--d", "2,3", "--n", "1", "--seeds", "2", "--jobs", "2"];
    let csv = |extra: &str| stdout(&ctsim(&[&args[..], &["--format", extra]].concat()));
    assert_eq!(csv("csv"), csv("csv"));
    let strip = |s: String| -> Vec<serde_json::Value> {
        s.lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                v.as_object_mut().unwrap().remove("wall_time");
                v
            })
            .collect()
    };
    assert_eq!(strip(csv("json")), strip(csv("json")));
}

#[test]
fn no_partial_file_on_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent").join("out.csv");
    let o = ctsim(&["sweep", "--format", "csv", "--output", missing.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!missing.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn dimension_cap_from_environment() {
    let args = ["verify", "--protocol", "ct-controlled", "--d", "3", "--n", "2"];
    let capped = Command::new(env!("CARGO_BIN_EXE_ctsim")).args(args).env("CT_DIM_CAP", "100").output().unwrap();
    assert_eq!(code(&capped), 2);
    assert!(stdout(&capped).starts_with("SKIP"));
    assert_eq!(code(&ctsim(&args)), 0);
    let bad = Command::new(env!("CARGO_BIN_EXE_ctsim")).args(args).env("CT_DIM_CAP", "lots").output().unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn build_output_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("swap.circ");
    let o = ctsim(&["build", "--protocol", "swap", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let c = parse_circuit(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(c.measurement_count(), 6);
}

#[test]
fn render_writes_a_diagram() {
    let o = ctsim(&["render", "--protocol", "toffoli"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("# d=2 wires=5"));
    assert!(parse_circuit(&text).is_ok());
}

#[test]
fn sample_reports_outcomes_and_fidelity() {
    for protocol in ["ct-controlled", "ct-x-simplified", "baseline-bidir"] {
        let o = ctsim(&["sample", "--protocol", protocol, "--d", "3", "--seed", "5"]);
        assert_eq!(code(&o), 0, "{protocol}");
        let line = stdout(&o);
        assert!(line.starts_with("outcomes (") && line.contains("fidelity 1.0000000000"), "{line}");
    }
}

#[test]
fn every_protocol_verifies_from_the_command_line() {
    for protocol in ["ct-controlled", "ct-x", "ct-x-simplified", "two-person", "swap", "toffoli", "baseline-bidir"] {
        let o = ctsim(&["verify", "--protocol", protocol, "--format", "text"]);
        assert_eq!(code(&o), 0, "{protocol}: {}", stdout(&o));
    }
}
