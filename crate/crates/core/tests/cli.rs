use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn specpart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specpart"))
        .args(args)
        .env_remove("SPECPART_THREADS")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_partition() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.mtx");
    let out = specpart(&["gen", "grid2d", "16", "8", "--out", path(&g)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&g).unwrap();
    assert!(text.starts_with("%%MatrixMarket matrix coordinate pattern symmetric"));

    let part = dir.path().join("p.txt");
    let report = dir.path().join("r.json");
    let trace = dir.path().join("t.jsonl");
    let out = specpart(&[
        "--input", path(&g), "--parts", "4", "--output", path(&part), "--report", path(&report), "--trace", path(&trace),
        "--doubled-cut",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lines: Vec<String> = std::fs::read_to_string(&part).unwrap().lines().map(String::from).collect();
    assert_eq!(lines.len(), 128);
    assert_eq!(lines[0].split_whitespace().next(), Some("0"));

    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["graph"]["vertices"], 128);
    assert_eq!(rep["config"]["nev"], 3);
    assert_eq!(rep["cutsize"].as_f64().unwrap(), 2.0 * rep["cut_edges"].as_f64().unwrap());
    for key in ["laplacian", "eigensolve", "partition", "total"] {
        assert!(rep["seconds"][key].is_number());
    }
    let iters = rep["iterations"].as_u64().unwrap() as usize;
    assert_eq!(std::fs::read_to_string(&trace).unwrap().lines().count(), iters + 1);
}

#[test]
fn disconnected_input_keeps_the_largest_component() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.mtx");
    // 6-cycle on 1..6, edge 7-8, isolated 9
    std::fs::write(
        &g,
        "%%MatrixMarket matrix coordinate pattern symmetric\n9 9 7\n2 1\n3 2\n4 3\n5 4\n6 5\n6 1\n8 7\n",
    )
    .unwrap();
    let part = dir.path().join("p.txt");
    let report = dir.path().join("r.json");
    let out = specpart(&["--input", path(&g), "--parts", "2", "--output", path(&part), "--report", path(&report)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ids: Vec<usize> = std::fs::read_to_string(&part)
        .unwrap()
        .lines()
        .map(|l| l.split_whitespace().next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(ids, vec![0, 1, 2, 3, 4, 5]);
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["graph"]["dropped_vertices"], 3);
    assert_eq!(rep["cut_edges"].as_f64(), Some(2.0));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mtx");
    std::fs::write(&bad, "%%MatrixMarket matrix array real general\n2 2\n").unwrap();
    assert_eq!(specpart(&["--input", path(&bad), "--parts", "2"]).status.code(), Some(2));

    let g = dir.path().join("g.mtx");
    assert!(specpart(&["gen", "path", "5", "--out", path(&g)]).status.success());
    assert_eq!(specpart(&["--input", path(&g), "--parts", "9"]).status.code(), Some(4));
    assert_eq!(specpart(&["--input", path(&g), "--parts", "1"]).status.code(), Some(4));
    assert_eq!(specpart(&["--input", path(&g), "--parts", "2", "--tolerance", "0"]).status.code(), Some(4));
    assert_eq!(specpart(&["gen", "grid2d", "0", "3", "--out", path(&g)]).status.code(), Some(1));
}

#[test]
fn thread_count_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.mtx");
    assert!(specpart(&["gen", "ring", "40", "--out", path(&g)]).status.success());
    let report = dir.path().join("r.json");
    let out = Command::new(env!("CARGO_BIN_EXE_specpart"))
        .args(["--input", path(&g), "--parts", "2", "--report", path(&report)])
        .env("SPECPART_THREADS", "3")
        .output()
        .unwrap();
    assert!(out.status.success());
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["config"]["threads"], 3);
}

#[test]
fn sweep_table() {
    let out = specpart(&[
        "sweep", "--graph", "grid2d:24x24", "--graph", "ring:30", "--parts", "2", "--precond", "jacobi,amg", "--tolerance",
        "1e-2,1e-3", "--no-time",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "graph,config,vertices,iterations,converged,cutsize,imbalance,error");
    assert_eq!(lines.len(), 1 + 2 * 4);
    assert!(lines.iter().any(|l| l.starts_with("ring:30,amg/auto/1e-2,30,")));
    let again = specpart(&[
        "sweep", "--graph", "grid2d:24x24", "--graph", "ring:30", "--parts", "2", "--precond", "jacobi,amg", "--tolerance",
        "1e-2,1e-3", "--no-time",
    ]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}
