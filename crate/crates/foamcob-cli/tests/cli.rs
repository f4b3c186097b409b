use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const CIRCLE: &str = "ring Q\ncup_w 1@1\ngate 1 u [5]@1\ncap_w 1@1\n";
const THETA: &str = "ring Q\ncup_w 2@1\nfork 1 1 u [1,2;3,4]@1\ngate 1 u [5]@2\njoin 1 1 u@1\ncap_w 2@1\n";

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_foamcob")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn setup(files: &[(&str, &str)]) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in files {
        fs::write(dir.path().join(name), body).unwrap();
    }
    dir
}

#[test]
fn invariant_of_a_circle_and_a_zero_foam() {
    let dir = setup(&[("c.dsl", CIRCLE), ("z.json", r#"{"points":[{"sign":1,"rank":3},{"sign":-1,"rank":3}]}"#)]);
    let o = run(&["invariant", "c.dsl"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "K1: 5\n");
    let o = run(&["invariant", "z.json"], dir.path());
    assert_eq!(stdout(&o), "K0: 0\n");
    let o = run(&["--format", "json", "invariant", "c.dsl"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["value"], "5");
}

#[test]
fn usage_errors_exit_two() {
    let dir = setup(&[("c.dsl", CIRCLE), ("bad.dsl", "ring Q\nwobble 1@1\n")]);
    assert_eq!(run(&["invariant", "missing.dsl"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["invariant", "bad.dsl"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["--ring", "Z", "invariant", "c.dsl"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"], dir.path()).status.code(), Some(2));
}

#[test]
fn verification_failures_exit_one() {
    let dir = setup(&[("open.dsl", "ring Q\ncup_w 1@1\n")]);
    assert_eq!(run(&["normalize", "open.dsl"], dir.path()).status.code(), Some(1));
}

#[test]
fn normalize_then_check() {
    let dir = setup(&[("t.dsl", THETA)]);
    let o = run(&["--verify", "--out", "nf", "normalize", "t.dsl"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("K1: "));
    let o = run(&["check", "t.dsl", "nf/circle.json", "nf/certificate.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "accepted\n");

    let path = dir.path().join("nf/certificate.json");
    let mut cert: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    let steps = cert["steps"].as_array_mut().unwrap();
    assert!(!steps.is_empty());
    let pos = steps[0]["location"]["pos"].as_u64().unwrap();
    steps[0]["location"]["pos"] = (pos + 1).into();
    fs::write(dir.path().join("bad.json"), cert.to_string()).unwrap();
    let o = run(&["check", "t.dsl", "nf/circle.json", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("rejected at step 0"));
}

#[test]
fn random_is_deterministic_and_valid() {
    let dir = setup(&[]);
    let a = stdout(&run(&["--seed", "9", "random"], dir.path()));
    let b = stdout(&run(&["--seed", "9", "random"], dir.path()));
    assert_eq!(a, b);
    fs::write(dir.path().join("r.dsl"), &a).unwrap();
    let o = run(&["validate", "r.dsl"], dir.path());
    assert_eq!(stdout(&o), "valid\n");
    let o = run(&["--seed", "9", "--ring", "Fp:5", "random", "--kind", "foam"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    fs::write(dir.path().join("f.json"), &o.stdout).unwrap();
    assert!(stdout(&run(&["invariant", "f.json"], dir.path())).starts_with("K1Quot: "));
}

#[test]
fn selftest_runs_the_chosen_suites() {
    let dir = setup(&[]);
    let o = run(&["selftest", "--suite", "1", "--suite", "2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("PASS criterion 1"));
    assert!(lines[1].starts_with("PASS criterion 2"));
    assert_eq!(run(&["selftest", "--suite", "9"], dir.path()).status.code(), Some(2));
}
