use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flaggraphs")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn build_plus_edge_list_is_sorted_and_deterministic() {
    let a = run(&["build", "plus", "-n", "2", "-q", "3"]);
    let b = run(&["--sequential", "build", "plus", "-n", "2", "-q", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 36 * 12 / 2);
    let mut sorted = lines.clone();
    sorted.sort();
    assert_eq!(lines, sorted);
    for line in lines {
        let (x, y) = line.split_once('\t').unwrap();
        assert!(x < y, "{line}");
    }
}

#[test]
fn json_format_carries_meta() {
    let out = run(&["build", "plus", "-n", "2", "-q", "3", "--format", "json"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["meta"]["order"], 36);
    assert_eq!(v["meta"]["valency"], 12);
    assert_eq!(v["meta"]["family"], "plus");
}

#[test]
fn skew_plane_graph_is_empty() {
    let out = run(&["build", "skew", "-n", "2", "-q", "5"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v = json(&run(&["build", "skew", "-n", "2", "-q", "5", "--format", "json"]));
    assert_eq!(v["meta"]["valency"], 0);
}

#[test]
fn exported_files_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("plus23");
    let prefix = prefix.to_str().unwrap();
    assert!(run(&["build", "plus", "-n", "2", "-q", "3", "--out", prefix]).status.success());
    let edges = format!("{prefix}.edges");
    let meta: Value = serde_json::from_str(&fs::read_to_string(format!("{prefix}.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["valency"], 12);

    let out = run(&["verify", "--edges", &edges, "--family", "plus", "-n", "2", "-q", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["invariants"]["girth"], 3);
    assert_eq!(report["quotient"]["multiplicity"], 2);
    assert!(report["claims"].as_array().unwrap().iter().all(|c| c["pass"] == true));

    let text = fs::read_to_string(&edges).unwrap();
    let tampered: String = text.lines().skip(1).map(|l| format!("{l}\n")).collect();
    fs::write(&edges, tampered).unwrap();
    let out = run(&["verify", "--edges", &edges, "--family", "plus", "-n", "2", "-q", "3"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn verify_family_reports_design() {
    let out = run(&["verify", "--family", "par", "-n", "3", "-q", "2"]);
    assert!(out.status.success());
    let report = json(&out);
    assert_eq!(report["design"]["v"], 8);
    assert_eq!(report["design"]["k"], 2);
    assert_eq!(report["design"]["lambda"], 1);
}

#[test]
fn gc_self_pairing_and_exit_codes() {
    assert!(run(&["build", "gc", "-q", "5", "--t", "1", "--e", "0", "--s", "1", "--r", "1"]).status.success());
    let out = run(&["build", "gc", "-q", "5", "--t", "4", "--e", "0", "--s", "1", "--r", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("self-paired"));
}

#[test]
fn usage_and_cap_errors() {
    assert_eq!(run(&["build", "plus", "-n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["build", "plus", "-n", "2", "-q", "6"]).status.code(), Some(2));
    assert_eq!(run(&["build", "plus", "-n", "3", "-q", "9"]).status.code(), Some(5));
}

#[test]
fn census_and_standard_form() {
    let v = json(&run(&["census", "--p", "5", "--c", "2", "--json"]));
    assert_eq!(v["count"], 2);
    assert_eq!(v["orbitals"][0]["valency"], 80);

    let v = json(&run(&["standard-form", "-q", "9", "--gen", "w^1,0", "--json"]));
    assert_eq!((v["t"].clone(), v["e"].clone(), v["s"].clone()), (1.into(), 0.into(), 2.into()));
    assert_eq!(v["order"], 8);
}

#[test]
fn feasibility_report() {
    let v = json(&run(&["feasible", "--group", "agammal1", "-n", "2", "-q", "4"]));
    assert_eq!(v["report"]["feasible"], true);
    let v = json(&run(&["feasible", "--group", "translations", "-n", "2", "-q", "3"]));
    assert_eq!(v["report"]["a3"], false);
}

/// Over GF(2) a flag (x, x + <d>) has far point x + d; intersecting compatible
/// flags are exactly the pairs sharing their far point.
fn far_point(label: &str) -> (u32, u32) {
    let (pt, line) = label.split_once('|').unwrap();
    let dir = line.split_once(';').unwrap().1;
    let parse = |s: &str| -> Vec<u32> { s.split(',').map(|c| c.parse().unwrap()).collect() };
    let (x, d) = (parse(pt), parse(dir));
    (x[0] ^ d[0], x[1] ^ d[1])
}

#[test]
fn plus_2_2_matches_golden_file() {
    let golden = include_str!("data/plus_2_2.edges");
    let out = run(&["build", "plus", "-n", "2", "-q", "2"]);
    assert_eq!(stdout(&out), golden);
    let mut per_far = std::collections::BTreeMap::new();
    for line in golden.lines() {
        let (a, b) = line.split_once('\t').unwrap();
        assert_eq!(far_point(a), far_point(b), "{line}");
        *per_far.entry(far_point(a)).or_insert(0) += 1;
    }
    assert_eq!(per_far.len(), 4);
    assert!(per_far.values().all(|&k| k == 3));
}
