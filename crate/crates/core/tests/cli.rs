//! End-to-end tests of the command-line surface, run against the compiled
//! binary for byte-exact stdout checks.

use std::path::PathBuf;
use std::process::{Command, Output};

use tdcover::graph::Graph;
use tdcover::treedepth::EliminationForest;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tdcover"))
}

fn write_tmp(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

const C5: &str = "5 5\n0 1\n1 2\n2 3\n3 4\n4 0\n";
const C4: &str = "4 4\n0 1\n1 2\n2 3\n3 0\n";
const K3: &str = "3 3\n0 1\n1 2\n2 0\n";

#[test]
fn hamcycle_yes_byte_exact() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_tmp(&dir, "c5.txt", C5);
    let out = run(&["solve", "hamcycle", "--graph", g.to_str().unwrap(), "--seed", "7", "--repeat", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, b"YES\n");
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("depth 5"), "stderr notice names the depth: {err}");
}

#[test]
fn pcc_no_answer() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_tmp(&dir, "k3.txt", K3);
    let out = run(&["solve", "pcc", "--graph", g.to_str().unwrap(), "-k", "1", "-l", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, b"NO\n");
}

#[test]
fn bad_forest_exits_2_and_names_edge() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_tmp(&dir, "c4.txt", C4);
    let f = write_tmp(&dir, "bad.txt", "-1 0 0 0\n");
    let out = run(&["solve", "hamcycle", "--graph", g.to_str().unwrap(), "--forest", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("edge 1 2"), "error names the offending edge: {err}");
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_tmp(&dir, "k3.txt", K3);
    // Unknown subcommand.
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    // Missing required parameter.
    assert_eq!(
        run(&["solve", "pcc", "--graph", g.to_str().unwrap(), "-k", "1"]).status.code(),
        Some(2)
    );
    // Parameter that the problem does not take.
    assert_eq!(
        run(&["solve", "hamcycle", "--graph", g.to_str().unwrap(), "-l", "3"]).status.code(),
        Some(2)
    );
    // Unreadable file.
    assert_eq!(
        run(&["solve", "hamcycle", "--graph", "/nonexistent/x.txt"]).status.code(),
        Some(2)
    );
    // Malformed graph: the message carries the line number.
    let bad = write_tmp(&dir, "bad.txt", "2 1\n0 0\n");
    let out = run(&["solve", "hamcycle", "--graph", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));
}

#[test]
fn stats_report_keys_and_bound() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_tmp(&dir, "c5.txt", C5);
    let stats = dir.path().join("stats.json");
    let out = run(&[
        "solve", "hamcycle", "--graph", g.to_str().unwrap(),
        "--seed", "3", "--repeat", "5", "--stats", stats.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&stats).unwrap();
    // Key order in the written JSON text is pinned.
    let expected_order = [
        "answer", "seed", "repetitions", "depth", "exclusive_calls",
        "inclusive_calls", "bound", "elapsed_ms", "peak_polys",
    ];
    let positions: Vec<usize> = expected_order
        .iter()
        .map(|k| text.find(&format!("\"{k}\"")).unwrap_or_else(|| panic!("missing key {k}")))
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "keys out of order: {text}");
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let obj = v.as_object().unwrap();
    assert_eq!(obj.len(), expected_order.len());
    assert_eq!(obj["answer"], "YES");
    assert_eq!(obj["seed"], 3);
    assert_eq!(obj["repetitions"], 5);
    let calls = obj["exclusive_calls"].as_u64().unwrap() + obj["inclusive_calls"].as_u64().unwrap();
    assert!(calls <= obj["bound"].as_u64().unwrap());
    assert!(obj["peak_polys"].as_u64().unwrap() <= obj["depth"].as_u64().unwrap() + 2);
}

#[test]
fn identical_invocations_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_tmp(&dir, "c4.txt", C4);
    let s1 = dir.path().join("s1.json");
    let s2 = dir.path().join("s2.json");
    let out1 = run(&["solve", "longcycle", "--graph", g.to_str().unwrap(), "-l", "3", "--seed", "11", "--stats", s1.to_str().unwrap()]);
    let out2 = run(&["solve", "longcycle", "--graph", g.to_str().unwrap(), "-l", "3", "--seed", "11", "--stats", s2.to_str().unwrap()]);
    assert_eq!(out1.stdout, out2.stdout);
    let mut v1: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&s1).unwrap()).unwrap();
    let mut v2: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&s2).unwrap()).unwrap();
    // Wall time is the one nondeterministic field.
    v1.as_object_mut().unwrap().remove("elapsed_ms");
    v2.as_object_mut().unwrap().remove("elapsed_ms");
    assert_eq!(v1, v2);
}

#[test]
fn forest_subcommand_emits_valid_forest() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_tmp(&dir, "c5.txt", C5);
    let out = run(&["forest", "--graph", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let parents = EliminationForest::parse_parents(&text).unwrap();
    let graph = Graph::parse(C5).unwrap();
    let t = EliminationForest::from_parents(&graph, &parents).unwrap();
    assert_eq!(t.depth(), 5);
}

#[test]
fn good_forest_is_used() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_tmp(&dir, "c4.txt", C4);
    // Chain forests are valid for any graph on the same vertices.
    let f = write_tmp(&dir, "chain.txt", "-1 0 1 2\n");
    let out = run(&["solve", "hamcycle", "--graph", g.to_str().unwrap(), "--forest", f.to_str().unwrap(), "--repeat", "15"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, b"YES\n");
    // No DFS notice when the forest is supplied.
    assert!(!String::from_utf8(out.stderr).unwrap().contains("DFS"));
}

#[test]
fn oracle_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_tmp(&dir, "k3.txt", K3);
    let out = run(&["oracle", "pcc", "--graph", g.to_str().unwrap(), "-k", "1", "-l", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, b"YES\n");

    let out = run(&["oracle", "cw", "--graph", g.to_str().unwrap(), "-w", "3", "-l", "3"]);
    assert_eq!(out.stdout, b"2\n");

    let out = run(&["oracle", "mw", "--graph", g.to_str().unwrap(), "-w", "3", "-l", "3"]);
    assert_eq!(out.stdout, b"16\n");

    // Explicit weights file.
    let w = write_tmp(&dir, "w.txt", "2 2 2\n");
    let out = run(&["oracle", "mw", "--graph", g.to_str().unwrap(), "-w", "6", "-l", "3", "--weights", w.to_str().unwrap()]);
    assert_eq!(out.stdout, b"16\n");

    // A weights file must carry exactly one value per edge.
    let short = write_tmp(&dir, "short.txt", "2 2\n");
    let out = run(&["oracle", "mw", "--graph", g.to_str().unwrap(), "-w", "6", "-l", "3", "--weights", short.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("expected 3 weights"));

    // Desk-scale guard trips with exit 2.
    let big: String = {
        let mut s = String::from("13 0\n");
        s.push_str("");
        s
    };
    let bigg = write_tmp(&dir, "big.txt", &big);
    let out = run(&["oracle", "pcc", "--graph", bigg.to_str().unwrap(), "-k", "1", "-l", "3"]);
    assert_eq!(out.status.code(), Some(2));
}
