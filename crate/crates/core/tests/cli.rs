use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use horner_mcts::experiment::SWEEP_HEADER;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_horner-mcts"))
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simplify_reports_each_stage() {
    let eq1 = golden("eq1.txt");
    let out = ok(&["simplify", path(&eq1), "--scheme", "x,y"]);
    assert!(out.contains("naive   9 mul + 2 add = 11"), "{out}");
    assert!(out.contains("horner  4 mul + 2 add = 6"), "{out}");
    assert!(out.contains("cse     4 mul + 2 add = 6"), "{out}");
    assert!(out.trim_end().ends_with("return t8"), "{out}");

    let out = ok(&["simplify", path(&eq1), "--scheme", "y,x"]);
    assert!(out.contains("horner  7 mul + 2 add = 9"), "{out}");

    let out = ok(&["simplify", path(&golden("sincos.txt")), "--scheme", "x", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["cse"]["mul"].as_u64().unwrap() + v["cse"]["add"].as_u64().unwrap(), 3);
    assert_eq!(v["scheme"], "x;forward");
}

#[test]
fn simplify_direction_flag() {
    let eq1 = golden("eq1.txt");
    let out = ok(&["simplify", path(&eq1), "--scheme", "y,x", "--direction", "backward"]);
    assert!(out.contains("scheme  y,x;backward"), "{out}");
    assert!(out.contains("horner  4 mul + 2 add = 6"), "{out}");
}

#[test]
fn search_prints_json() {
    let out = ok(&[
        "search",
        path(&golden("eq1.txt")),
        "--n-updates",
        "60",
        "--repeats",
        "2",
        "--criterion",
        "uct",
        "--cp",
        "0.5",
        "--seed",
        "4",
    ]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    for key in [
        "best_total", "best_mul", "best_add", "scheme", "direction", "criterion", "cp",
        "n_updates", "repeats", "seed",
    ] {
        assert!(v.get(key).is_some(), "missing {key}: {out}");
    }
    assert_eq!(v["best_total"], 6);
    assert_eq!(v["criterion"], "uct");
    assert_eq!(v["repeats"], 2);
}

#[test]
fn sweep_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let eq1 = golden("eq1.txt");
    let [a, b] = ["a.csv", "b.csv"].map(|n| dir.path().join(n));
    for out in [&a, &b] {
        ok(&[
            "sweep", path(&eq1), "--samples", "5", "--n-updates", "30", "--seed", "9", "-o",
            path(out),
        ]);
    }
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let text = String::from_utf8(text).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], SWEEP_HEADER);
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("0,"));

    let one = ok(&["sweep", path(&eq1), "--samples", "1", "--n-updates", "5"]);
    assert_eq!(one.lines().count(), 2);

    let out = ok(&["analyze", path(&a), "--epsilon", "0.05"]);
    assert!(out.contains("global min  6"), "{out}");
    let json = ok(&["analyze", path(&a), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["global_min"], 6);
}

#[test]
fn bruteforce_and_generate() {
    let out = ok(&["bruteforce", path(&golden("eq1.txt")), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["best_total"], 6);
    assert_eq!(v["evaluated"], 6);

    let dir = tempfile::tempdir().unwrap();
    let res = dir.path().join("res.txt");
    ok(&["generate", "resultant", "2", "1", "-o", path(&res)]);
    let out = ok(&["bruteforce", path(&res)]);
    assert!(out.contains("best       5 mul + 2 add = 7"), "{out}");

    let text = ok(&[
        "generate", "random", "--vars", "5", "--terms", "30", "--max-exponent", "3",
        "--coeff-range", "10", "--seed", "42",
    ]);
    assert_eq!(
        text,
        std::fs::read_to_string(golden("random_v5_t30_e3_c10_s42.txt")).unwrap()
    );
    let preset = ok(&["generate", "preset", "hep-like-15"]);
    assert!(preset.contains("x15"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["search", "x.txt", "--criterion", "ucb"]).status.code(), Some(1));
    assert_eq!(run(&["generate", "preset", "hep"]).status.code(), Some(1));

    let missing = run(&["simplify", "/definitely/not/here.txt"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("not/here.txt"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "x + * y").unwrap();
    let o = run(&["simplify", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("syntax error"));

    let eq1 = golden("eq1.txt");
    assert_eq!(run(&["simplify", path(&eq1), "--scheme", "x,q"]).status.code(), Some(2));
    assert_eq!(run(&["search", path(&eq1), "--cp=-1"]).status.code(), Some(2));
    assert_eq!(
        run(&["sweep", path(&eq1), "--cp-min", "5", "--cp-max", "1"]).status.code(),
        Some(2)
    );
    let wide = dir.path().join("wide.txt");
    std::fs::write(&wide, "a*b*c*d*e*f*g*h*i").unwrap();
    assert_eq!(run(&["bruteforce", path(&wide)]).status.code(), Some(2));
}
