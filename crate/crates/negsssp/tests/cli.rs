use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use negsssp::io::{format_dimacs, parse_dimacs};
use negsssp_core::fixtures;

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_negsssp"))
        .args(args)
        .current_dir(dir)
        .env_remove("NEGSSSP_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.gr"), format_dimacs(&fixtures::a())).unwrap();
    fs::write(dir.path().join("b.gr"), format_dimacs(&fixtures::b())).unwrap();
    dir
}

#[test]
fn solve_and_oracle_agree_on_fixture_a() {
    let dir = setup();
    let solve = run(&["solve", "a.gr", "--source", "1", "--json"], dir.path());
    assert!(solve.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&solve)).unwrap();
    assert_eq!(v["distances"], serde_json::json!([0.0, 1.0, -4.0, -2.0]));
    assert_eq!(v["tree"], serde_json::json!([null, 1, 2, 3]));
    assert!(v["meta"]["iterations"].is_number());

    let oracle = run(&["oracle", "a.gr"], dir.path());
    assert_eq!(stdout(&oracle), "1 0 -\n2 1 1\n3 -4 2\n4 -2 3\n");
    assert_eq!(stdout(&run(&["solve", "a.gr"], dir.path())), stdout(&oracle));
}

#[test]
fn cycle_is_reported() {
    let dir = setup();
    let out = run(&["solve", "b.gr", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["total"], serde_json::json!(-2.0));
}

#[test]
fn exit_codes() {
    let dir = setup();
    assert_eq!(run(&["solve"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["solve", "missing.gr"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["solve", "a.gr", "--source", "9"], dir.path()).status.code(), Some(2));
    fs::write(dir.path().join("bad.pot"), "1 0\n2 10\n3 0\n4 0\n").unwrap();
    fs::write(dir.path().join("good.pot"), "1 0\n2 0\n3 -5\n4 -3\n").unwrap();
    assert_eq!(run(&["audit", "--potential", "good.pot", "a.gr"], dir.path()).status.code(), Some(0));
    let bad = run(&["audit", "--potential", "bad.pot", "a.gr"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("violated edge 1"));
}

#[test]
fn normalize_writes_graph_and_map() {
    let dir = setup();
    assert!(run(&["normalize", "a.gr", "n.gr"], dir.path()).status.success());
    let g = parse_dimacs(&fs::read_to_string(dir.path().join("n.gr")).unwrap()).unwrap();
    assert!(negsssp_core::preprocess::is_normal_form(&g));
    let map = fs::read_to_string(dir.path().join("n.gr.map")).unwrap();
    assert_eq!(map.lines().count(), 4);
    assert!(map.starts_with("1 1 2\n"));
}

#[test]
fn hopdist_lines() {
    let dir = setup();
    let out = stdout(&run(&["hopdist", "a.gr", "--source", "1", "--hops", "1"], dir.path()));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 8);
    assert_eq!(lines[3], "4 0 inf");
    assert_eq!(lines[7], "4 1 -2");
}

#[test]
fn gen_is_deterministic_and_sandwich_audits() {
    let dir = setup();
    let args = ["gen", "--n", "12", "--m", "30", "--structure", "layered-sandwich", "--seed", "4"];
    let first = stdout(&run(&args, dir.path()));
    assert_eq!(first, stdout(&run(&args, dir.path())));
    let mut with_files = args.to_vec();
    with_files.extend(["-o", "l.gr", "--sandwich", "sw.json"]);
    assert!(run(&with_files, dir.path()).status.success());
    assert_eq!(fs::read_to_string(dir.path().join("l.gr")).unwrap(), first);
    let audit = run(&["audit", "sandwich", "l.gr", "sw.json"], dir.path());
    assert!(audit.status.success(), "{}", stdout(&audit));

    let out = run(&["audit", "betweenness", "l.gr", "--r", "2", "--pairs", "3", "--seed", "1"], dir.path());
    assert_eq!(stdout(&out).lines().count(), 3);
}

#[test]
fn seed_from_environment() {
    let dir = setup();
    let with_env = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_negsssp"))
            .args(["gen", "--n", "10", "--m", "20"])
            .env("NEGSSSP_SEED", seed)
            .current_dir(dir.path())
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(with_env("3"), stdout(&run(&["gen", "--n", "10", "--m", "20", "--seed", "3"], dir.path())).into_bytes());
    assert_ne!(with_env("3"), with_env("4"));
}

#[test]
fn diff_over_directory() {
    let dir = setup();
    let out = run(&["diff", ".", "--seeds", "1,2"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 5);
    fs::write(dir.path().join("broken.gr"), "p sp 1 1\n").unwrap();
    assert_eq!(run(&["diff", "."], dir.path()).status.code(), Some(1));
}
