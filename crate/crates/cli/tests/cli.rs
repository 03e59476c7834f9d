//! End-to-end checks of the command-line surface: exit codes, record output
//! and seed reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_patfree"))
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("patfree-cli-test-{}-{name}", std::process::id()));
    p
}

fn write_tmp(name: &str, content: &str) -> PathBuf {
    let p = tmp(name);
    std::fs::write(&p, content).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn classify_reports_not_removable() {
    let pat = write_tmp("p100", "100");
    let out = run(&["classify", "--pattern", pat.to_str().unwrap(), "--format", "records"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert_eq!(v["kind"], "not-removable");
    assert_eq!(v["guaranteed"], true);
}

#[test]
fn classify_witness_verifies() {
    let pat = write_tmp("p1000", "1000");
    let out = run(&[
        "classify",
        "--pattern",
        pat.to_str().unwrap(),
        "--witness",
        "--format",
        "records",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["witness"]["verified"], true);
}

#[test]
fn exact_distance_matches_streaming_and_brute_force() {
    let input = write_tmp("s100100", "100100");
    let pat = write_tmp("p100b", "100");
    let out = run(&[
        "distance",
        "--input",
        input.to_str().unwrap(),
        "--pattern",
        pat.to_str().unwrap(),
        "--exact",
        "--format",
        "records",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["lower"], 2);
    assert_eq!(v["exact"], true);
}

#[test]
fn flipset_roundtrip_produces_free_array() {
    let input = write_tmp("s1010101", "1010101");
    let pat = write_tmp("p101", "101");
    let repaired = tmp("repaired.nda");
    let out = run(&[
        "flipset",
        "--input",
        input.to_str().unwrap(),
        "--pattern",
        pat.to_str().unwrap(),
        "--out",
        repaired.to_str().unwrap(),
        "--format",
        "records",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["count"], 2);
    assert_eq!(v["verified_free"], true);
    let text = std::fs::read_to_string(&repaired).unwrap();
    assert!(text.starts_with("NDA 1"));
}

#[test]
fn flipset_on_almost_homogeneous_is_usage_error() {
    let input = write_tmp("sah", "100100");
    let pat = write_tmp("pah", "100");
    let out = run(&[
        "flipset",
        "--input",
        input.to_str().unwrap(),
        "--pattern",
        pat.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn test_far_instance_exits_one_and_close_exits_zero() {
    let pat = write_tmp("p1001", "1001");
    let far_file = tmp("far.nda");
    let gen = run(&[
        "gen",
        "planted",
        "--n",
        "200000",
        "--pattern",
        pat.to_str().unwrap(),
        "--copies",
        "4400",
        "--seed",
        "5",
        "--out",
        far_file.to_str().unwrap(),
        "--format",
        "records",
    ]);
    assert!(gen.status.success());
    let g: serde_json::Value = serde_json::from_str(stdout(&gen).trim()).unwrap();
    assert!(g["relative"].as_f64().unwrap() >= 0.02);

    let out = run(&[
        "test",
        "--input",
        far_file.to_str().unwrap(),
        "--pattern",
        pat.to_str().unwrap(),
        "--eps1",
        "0.005",
        "--eps2",
        "0.02",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(1), "far instance should reject");

    let free = write_tmp("free", &"0".repeat(2000));
    let out = run(&[
        "test",
        "--input",
        free.to_str().unwrap(),
        "--pattern",
        pat.to_str().unwrap(),
        "--eps1",
        "0.005",
        "--eps2",
        "0.02",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0), "free instance should accept");
}

#[test]
fn seeded_runs_reproduce_byte_for_byte() {
    let input = write_tmp("srep", &"10".repeat(600));
    let pat = write_tmp("prep", "101");
    let args = [
        "distance",
        "--input",
        input.to_str().unwrap(),
        "--pattern",
        pat.to_str().unwrap(),
        "--approx",
        "--tau",
        "0.25",
        "--delta",
        "0.05",
        "--seed",
        "42",
        "--format",
        "records",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn unseeded_runs_emit_their_seed() {
    let input = write_tmp("sunseeded", &"10".repeat(600));
    let pat = write_tmp("punseeded", "101");
    let out = run(&[
        "distance",
        "--input",
        input.to_str().unwrap(),
        "--pattern",
        pat.to_str().unwrap(),
        "--approx",
        "--format",
        "records",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!(v["seed"].as_u64().is_some());
}

#[test]
fn malformed_input_is_usage_error() {
    let bad = write_tmp("bad.nda", "NDA 1 dims 2 2 3 alphabet 2 0 1 1 0");
    let pat = write_tmp("pmal", "101");
    let out = run(&[
        "distance",
        "--input",
        bad.to_str().unwrap(),
        "--pattern",
        pat.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_budget_exceeded_exits_three() {
    let input = write_tmp("szeros", &"0".repeat(41));
    let pat = write_tmp("pz", "000");
    let out = run(&[
        "oracle",
        "deletion",
        "--input",
        input.to_str().unwrap(),
        "--pattern",
        pat.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oracle_agreement_on_small_instance() {
    let input = write_tmp("s10101", "10101");
    let pat = write_tmp("p101o", "101");
    let del = run(&[
        "oracle",
        "deletion",
        "--input",
        input.to_str().unwrap(),
        "--pattern",
        pat.to_str().unwrap(),
        "--format",
        "records",
    ]);
    assert!(del.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&del).trim()).unwrap();
    assert_eq!(v["deletion_number"], 1);

    let hit = run(&[
        "oracle",
        "hitting",
        "--input",
        input.to_str().unwrap(),
        "--pattern",
        pat.to_str().unwrap(),
        "--format",
        "records",
    ]);
    let v: serde_json::Value = serde_json::from_str(stdout(&hit).trim()).unwrap();
    assert_eq!(v["hitting_number"], 1);
}

#[test]
fn lowerbound_experiment_stays_within_bound() {
    let out = run(&[
        "bench",
        "lowerbound",
        "--n",
        "10000",
        "--k",
        "20",
        "--eps",
        "0.005",
        "--trials",
        "500",
        "--seed",
        "3",
        "--format",
        "records",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["report"]["within_bound"], true);
}

#[test]
fn gen_lb_reports_copies() {
    let out_file = tmp("lb.nda");
    let out = run(&[
        "gen",
        "lb",
        "--n",
        "4000",
        "--k",
        "20",
        "--eps",
        "0.005",
        "--kind",
        "c",
        "--seed",
        "9",
        "--out",
        out_file.to_str().unwrap(),
        "--format",
        "records",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["pattern_copies"], 40);
}
