mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use common::check_dot;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_interinfo"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn xor_csv(dir: &Path) -> PathBuf {
    let path = dir.join("xor.csv");
    let out = run(&[
        "synth",
        "--kind",
        "parity",
        "-n",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

/// Structural equality with a small tolerance on numbers.
fn same_json(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            (x - y).abs() <= 1e-12 * x.abs().max(1.0)
        }
        (Value::Array(x), Value::Array(y)) => {
            x.len() == y.len() && x.iter().zip(y).all(|(p, q)| same_json(p, q))
        }
        (Value::Object(x), Value::Object(y)) => {
            x.len() == y.len()
                && x.iter()
                    .zip(y)
                    .all(|((k1, v1), (k2, v2))| k1 == k2 && same_json(v1, v2))
        }
        _ => a == b,
    }
}

#[test]
fn measure_xor_matches_golden_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = xor_csv(dir.path());
    let out = run(&[
        "measure",
        "--in",
        csv.to_str().unwrap(),
        "--subset",
        "A,B,C",
    ]);
    assert_eq!(code(&out), 0);
    let got: Value = serde_json::from_slice(&out.stdout).unwrap();
    let want: Value = serde_json::from_str(include_str!("golden/measure_xor.json")).unwrap();
    assert!(same_json(&got, &want), "{got:#}");
    assert_eq!(got["measures"][0]["bits"].as_f64(), Some(1.0));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = xor_csv(dir.path());
    let csv = csv.to_str().unwrap();
    let out_dir = dir.path().join("out");
    let out_dir = out_dir.to_str().unwrap();

    let no_label = run(&["analyze", "--in", csv, "--out", out_dir]);
    assert_eq!(code(&no_label), 1);
    assert!(String::from_utf8_lossy(&no_label.stderr).contains("Usage"));

    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(
        code(&run(&[
            "measure", "--in", csv, "--subset", "A,B", "--bogus"
        ])),
        1
    );
    assert_eq!(
        code(&run(&[
            "measure", "--in", csv, "--subset", "A,B", "--alpha", "1.5"
        ])),
        1
    );
    assert_eq!(code(&run(&["measure", "--in", csv, "--subset", "A"])), 1);
    assert_eq!(
        code(&run(&[
            "analyze", "--in", csv, "--label", "C", "-k", "1", "--out", out_dir
        ])),
        1
    );
    assert_eq!(
        code(&run(&[
            "measure",
            "--in",
            csv,
            "--subset",
            "A,B",
            "--estimator",
            "magic"
        ])),
        1
    );
    assert_eq!(code(&run(&["--help"])), 0);

    assert_eq!(
        code(&run(&[
            "measure",
            "--in",
            "/nonexistent.csv",
            "--subset",
            "A,B"
        ])),
        2
    );
    assert_eq!(code(&run(&["measure", "--in", csv, "--subset", "A,Q"])), 2);
    assert_eq!(
        code(&run(&[
            "analyze", "--in", csv, "--label", "Q", "--out", out_dir
        ])),
        2
    );
}

#[test]
fn analyze_writes_declared_files_as_valid_dot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = xor_csv(dir.path());
    let out_dir = dir.path().join("out");
    let out = run(&[
        "analyze",
        "--in",
        csv.to_str().unwrap(),
        "--label",
        "C",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let declared: Vec<&str> = report["diagrams"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(
        declared,
        [
            "interaction.dot",
            "conditional.dot",
            "dendrogram.nwk",
            "dendrogram.dot",
            "report.json"
        ]
    );
    for name in declared {
        let text = std::fs::read_to_string(out_dir.join(name)).unwrap();
        if name.ends_with(".dot") {
            check_dot(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
            assert!(text.starts_with("// interinfo "));
            assert!(!text.contains('\r'));
        }
    }
    let on_disk: Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(on_disk, report);
    let igraph = std::fs::read_to_string(out_dir.join("interaction.dot")).unwrap();
    assert!(igraph.contains("\"A\" -- \"B\" [style=solid, label=\"+100.0%\"]"));
}

#[test]
fn single_diagram_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let csv = xor_csv(dir.path());
    let csv = csv.to_str().unwrap();
    let out = dir.path().join("single");
    let o = out.to_str().unwrap();
    for args in [
        vec!["infograph", "--in", csv, "--attrs", "A,B,C", "--out", o],
        vec!["igraph", "--in", csv, "--label", "C", "--out", o],
        vec![
            "condgraph",
            "--in",
            csv,
            "--label",
            "C",
            "-k",
            "2",
            "--threshold",
            "0",
            "--out",
            o,
        ],
        vec![
            "dendrogram",
            "--in",
            csv,
            "--label",
            "C",
            "--format",
            "dot",
            "--out",
            o,
        ],
    ] {
        let r = run(&args);
        assert_eq!(
            code(&r),
            0,
            "{args:?}: {}",
            String::from_utf8_lossy(&r.stderr)
        );
    }
    for name in [
        "information.dot",
        "interaction.dot",
        "conditional.dot",
        "dendrogram.dot",
    ] {
        let text = std::fs::read_to_string(out.join(name)).unwrap();
        check_dot(&text).unwrap_or_else(|e| panic!("{name}: {e}\n{text}"));
    }
    assert!(!out.join("dendrogram.nwk").exists());
    // threshold 0 keeps the single pair A--B given C
    let cond = std::fs::read_to_string(out.join("conditional.dot")).unwrap();
    assert!(cond.contains("\"A\" -- \"B\""));
    assert_eq!(
        code(&run(&[
            "dendrogram",
            "--in",
            csv,
            "--label",
            "C",
            "--format",
            "svg",
            "--out",
            o
        ])),
        1
    );
    assert_eq!(
        code(&run(&[
            "infograph",
            "--in",
            csv,
            "--attrs",
            "A",
            "--out",
            o
        ])),
        1
    );
}

#[test]
fn synth_is_seed_deterministic() {
    let a = run(&["synth", "--kind", "mixture", "-n", "200", "--seed", "9"]);
    let b = run(&["synth", "--kind", "mixture", "-n", "200", "--seed", "9"]);
    let c = run(&["synth", "--kind", "mixture", "-n", "200", "--seed", "10"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    // exhaustive mode rejects counts it cannot represent exactly
    assert_eq!(code(&run(&["synth", "--kind", "parity", "-n", "5"])), 1);
    assert_eq!(code(&run(&["synth", "--kind", "sudoku"])), 1);
}

#[test]
fn dot_checker_rejects_malformed_input() {
    assert!(check_dot("graph g { a -- b; }").is_ok());
    assert!(check_dot("digraph { a -> b [label=\"x\"] }").is_ok());
    assert!(check_dot("graph g { a -> b; }").is_err());
    assert!(check_dot("graph g { a -- ; }").is_err());
    assert!(check_dot("graph g { a [label=\"x] }").is_err());
    assert!(check_dot("graph g { a -- b ").is_err());
}
