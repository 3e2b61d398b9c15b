use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hierdecode"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn workdir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("h.tsv"), "r\tA\nA\ta1\nA\ta2\nr\tb\n").unwrap();
    fs::write(dir.path().join("p.csv"), "a1,a2,b\n0.4,0.3,0.3\n").unwrap();
    fs::write(dir.path().join("labels.txt"), "a1\n").unwrap();
    dir
}

#[test]
fn validate_and_decode_small_tree() {
    let dir = workdir();
    let o = run(dir.path(), &["validate", "--hierarchy", "h.tsv", "--metric", "dl"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("5 nodes, 3 leaves"), "{out}");
    assert!(out.contains("StrictReasonable"), "{out}");

    let o = run(dir.path(), &["decode", "--hierarchy", "h.tsv", "--probs", "p.csv", "--metric", "hf:1.0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "a1");

    let o = run(dir.path(), &["decode", "--hierarchy", "h.tsv", "--probs", "p.csv", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v, serde_json::json!([["A"]]));
}

#[test]
fn stop_nodes_extend_the_leaf_set() {
    let dir = workdir();
    fs::write(dir.path().join("p5.csv"), "a1,a2,A#stop,b,r#stop\n0.1,0.1,0.6,0.1,0.1\n").unwrap();
    let o = run(dir.path(), &["validate", "--hierarchy", "h.tsv", "--add-stop-nodes", "all"]);
    assert!(stdout(&o).contains("7 nodes, 5 leaves"));
    let o = run(
        dir.path(),
        &["decode", "--hierarchy", "h.tsv", "--probs", "p5.csv", "--add-stop-nodes", "all", "--decoder", "argmax"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "A#stop");
}

#[test]
fn synth_is_reproducible() {
    let dir = workdir();
    for out in ["s1", "s2"] {
        let o = run(dir.path(), &["synth", "--tree", "balanced:3:2", "--n", "50", "--seed", "7", "--output", out]);
        assert_eq!(o.status.code(), Some(0));
    }
    for f in ["hierarchy.tsv", "probs.csv", "labels.txt"] {
        let a = fs::read(dir.path().join("s1").join(f)).unwrap();
        let b = fs::read(dir.path().join("s2").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
    let o = run(
        dir.path(),
        &["eval", "--hierarchy", "s1/hierarchy.tsv", "--probs", "s1/probs.csv", "--labels", "s1/labels.txt"],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("optimal:dl"));
}

#[test]
fn exit_codes() {
    let dir = workdir();
    let code = |args: &[&str]| run(dir.path(), args).status.code();
    assert_eq!(code(&["frobnicate"]), Some(1));
    assert_eq!(code(&["validate", "--hierarchy", "h.tsv", "--metric", "nope"]), Some(1));
    assert_eq!(code(&["decode", "--hierarchy", "h.tsv", "--probs", "p.csv", "--decoder", "bogus"]), Some(1));
    assert_eq!(code(&["validate", "--hierarchy", "missing.tsv"]), Some(2));
    assert_eq!(code(&["eval", "--hierarchy", "h.tsv", "--probs", "p.csv", "--labels", "h.tsv"]), Some(2));
    assert_eq!(code(&["verify", "--trials", "10"]), Some(0));
}

#[test]
fn output_flag_writes_a_file() {
    let dir = workdir();
    let o = run(
        dir.path(),
        &["agreement", "--hierarchy", "h.tsv", "--resolution", "4", "--output", "grid.csv"],
    );
    assert_eq!(o.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert_eq!(csv.lines().count(), 16);
}
