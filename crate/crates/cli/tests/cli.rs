use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;
use testspaces::graphs::io::GraphFile;
use testspaces::graphs::{build_diamond, build_weighted_diamond};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_testspaces"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    /// Runs `gen` with the given family arguments into `name`.
    fn gen(&self, name: &str, family: &[&str]) -> PathBuf {
        let path = self.path(name);
        let mut args = vec!["gen"];
        args.extend_from_slice(family);
        args.extend_from_slice(&["--out", path.to_str().unwrap()]);
        let out = run(&args);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        path
    }
}

fn read_graph(path: &Path) -> GraphFile {
    GraphFile::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_diamond_and_weighted_diamond() {
    let dir = Dir::new();
    let d2 = read_graph(&dir.gen("d2.json", &["diamond", "--level", "2"]));
    assert_eq!(d2.n, 12);
    assert!(d2.structure.is_some());
    let w1 = read_graph(&dir.gen("w1.json", &["wdiamond", "--level", "1", "--eps", "0.25"]));
    assert_eq!(w1.edges.len(), 5);
}

#[test]
fn round_trip_reproduces_the_graph() {
    let dir = Dir::new();
    let file = read_graph(&dir.gen("d3.json", &["diamond", "--level", "3"]));
    let (g, st) = build_diamond(3).unwrap();
    assert_eq!(file.graph().unwrap(), g);
    assert_eq!(file.structure.unwrap(), st);
    let file = read_graph(&dir.gen("w2.json", &["wdiamond", "--level", "2", "--eps", "0.1"]));
    let (g, st) = build_weighted_diamond(2, 0.1).unwrap();
    assert_eq!(file.graph().unwrap(), g);
    assert_eq!(file.structure.unwrap(), st);
}

#[test]
fn rational_weights_are_strings() {
    let out = run(&["--rational", "gen", "wdiamond", "--level", "1", "--eps", "1/4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["edges"][1][2], "3/4");
}

#[test]
fn generated_output_is_deterministic() {
    let a = run(&["gen", "sp", "--steps", "25", "--seed", "3", "--remove-prob", "0.2"]);
    let b = run(&["gen", "sp", "--steps", "25", "--seed", "3", "--remove-prob", "0.2"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn series_parallel_file_passes_verify() {
    let dir = Dir::new();
    let sp = dir.gen("sp.json", &["sp", "--steps", "10", "--seed", "7"]);
    let out = run(&["verify", "sp", "--input", s(&sp)]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn k4_file_fails_verify_with_violation_code() {
    let dir = Dir::new();
    let path = dir.path("k4.json");
    std::fs::write(&path, r#"{"n": 4, "edges": [[0,1,1],[0,2,1],[0,3,1],[1,2,1],[1,3,1],[2,3,1]]}"#).unwrap();
    let out = run(&["verify", "sp", "--input", s(&path)]);
    assert_eq!(code(&out), 1);
}

#[test]
fn dot_export() {
    let dir = Dir::new();
    let dot = dir.path("c.dot");
    let out = run(&["gen", "cycle", "--n", "5", "--dot", s(&dot)]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.starts_with("graph") && text.contains("4 -- 0"));
}

#[test]
fn embed_weighted_diamond_report() {
    let dir = Dir::new();
    let w1 = dir.gen("w1.json", &["wdiamond", "--level", "1", "--eps", "0.25"]);
    let csv = dir.path("w1.csv");
    let out = run(&["embed", "wdiamond", "--input", s(&w1), "--out", s(&csv)]);
    assert_eq!(code(&out), 0);
    let d = json(&out)["report"]["distortion"].as_f64().unwrap();
    assert!((d - 1.3416408).abs() < 1e-7, "{d}");
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().next(), Some("point_label,x_0,x_1"));
    assert_eq!(text.lines().count(), 5);
    let again = run(&["embed", "wdiamond", "--input", s(&w1)]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn embed_dinfinity_line_map() {
    let dir = Dir::new();
    let ball = dir.gen("ball.json", &["dinfty", "--radius", "10"]);
    let out = run(&["embed", "dinfty-phi", "--input", s(&ball)]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["report"]["distortion"], 4.0);
}

#[test]
fn embed_glue_of_one_isometric_block() {
    let dir = Dir::new();
    let g = dir.gen("g.json", &["glue", "--block", "path:3"]);
    let out = run(&["embed", "glue", "--input", s(&g)]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["report"]["distortion"], 1.0);
}

#[test]
fn embed_glue_of_several_blocks_respects_the_bound() {
    let dir = Dir::new();
    let g = dir.gen(
        "g.json",
        &[
            "glue",
            "--block",
            "tree:2@0",
            "--block",
            "cycle:6@3",
            "--block",
            "wdiamond:2:0.25@1",
        ],
    );
    let v = json(&run(&["embed", "glue", "--input", s(&g)]));
    let r = &v["report"];
    assert!(r["lip"].as_f64().unwrap() <= 1.0 + 1e-9);
    assert!(r["lip_inv"].as_f64().unwrap() <= v["lip_inv_bound"].as_f64().unwrap());
}

#[test]
fn embed_method_mismatch_is_bad_input() {
    let dir = Dir::new();
    let c = dir.gen("c.json", &["cycle", "--n", "4"]);
    assert_eq!(code(&run(&["embed", "wdiamond", "--input", s(&c)])), 2);
    assert_eq!(code(&run(&["embed", "glue", "--input", s(&c)])), 2);
    assert_eq!(code(&run(&["embed", "dinfty-phi", "--input", s(&c)])), 2);
}

#[test]
fn verify_suites_pass() {
    for args in [
        vec!["verify", "entropy", "--level", "4"],
        vec!["verify", "rr", "--cycle", "7", "--max-tree", "10"],
        vec!["verify", "bound", "--eps", "0.25", "--max-level", "5"],
        vec!["verify", "generations", "--max-level", "4"],
        vec!["verify", "exits", "--max-level", "4"],
        vec!["verify", "claim42", "--level", "3"],
        vec!["--rational", "verify", "edgeiso", "--max-level", "3"],
        vec!["verify", "bigon"],
    ] {
        let out = run(&args);
        assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stdout));
        let v = json(&out);
        assert_eq!(v["violations"].as_array().unwrap().len(), 0);
        assert_eq!(v["certified"], true);
    }
}

#[test]
fn verify_all_runs_every_suite() {
    let out = run(&["verify", "all"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["check"].as_str().unwrap()).collect();
    assert_eq!(names, testspaces::verify::SUITES);
}

#[test]
fn verify_is_deterministic_apart_from_runtime() {
    let strip = |mut v: Value| {
        v["runtime_ms"] = Value::Null;
        v
    };
    let a = strip(json(&run(&["verify", "exits", "--max-level", "3"])));
    let b = strip(json(&run(&["verify", "exits", "--max-level", "3"])));
    assert_eq!(a, b);
}

#[test]
fn verify_budget_exhaustion_has_its_own_code() {
    let out = run(&["--budget", "5", "verify", "rr", "--cycle", "6", "--max-tree", "6"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["certified"], false);
}

#[test]
fn mindist_examples() {
    let dir = Dir::new();
    let c4 = dir.gen("c4.json", &["cycle", "--n", "4"]);
    let c3 = dir.gen("c3.json", &["cycle", "--n", "3"]);
    let p = dir.gen("p.json", &["path", "--n", "2"]);
    let t1 = dir.gen("t1.json", &["tree", "--depth", "1"]);
    let d1 = dir.gen("d1.json", &["diamond", "--level", "1"]);
    for (a, b, value) in [(&c4, &c4, 1.0), (&t1, &d1, 1.0), (&c3, &p, 2.0)] {
        let out = run(&["mindist", s(a), s(b)]);
        assert_eq!(code(&out), 0);
        let v = json(&out);
        assert_eq!(v["value"], value);
        assert_eq!(v["certified"], true);
    }
    let out = run(&["mindist", s(&c4), s(&c3)]);
    assert_eq!(code(&out), 2);
    let c6 = dir.gen("c6.json", &["cycle", "--n", "6"]);
    let out = run(&["--budget", "3", "mindist", s(&c6), s(&c6)]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["certified"], false);
}

#[test]
fn metric_and_separated_sets() {
    let dir = Dir::new();
    let d1 = dir.gen("d1.json", &["diamond", "--level", "1"]);
    let csv = dir.path("d1.csv");
    let out = run(&["metric", "--input", s(&d1), "--out", s(&csv)]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["diameter"], 2.0);
    assert_eq!(v["is_metric"], true);
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().next(), Some("point,bottom,top,ra,rb"));
    let out = run(&["separated", "--input", s(&d1), "--delta", "2"]);
    let v = json(&out);
    assert_eq!(v["members"].as_array().unwrap().len(), 2);
    assert_eq!(v["certified_max"], true);
}

#[test]
fn bad_input_exit_code() {
    assert_eq!(code(&run(&["gen", "cycle", "--n", "2"])), 2);
    assert_eq!(code(&run(&["gen", "wdiamond", "--level", "1", "--eps", "0.7"])), 2);
    assert_eq!(code(&run(&["mindist", "/nonexistent/a.json", "/nonexistent/b.json"])), 2);
    assert_ne!(code(&run(&["gen", "tree"])), 0);
}
