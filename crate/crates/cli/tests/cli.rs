use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use looptool::powersum::CoverPolynomial;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
}

fn looptool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_looptool"))
        .args(args)
        .env_remove("LOOPTOOL_PREC")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn avg_examples() {
    let o = looptool(&[
        "avg",
        "--f",
        path_str(&data("one_over_1_minus_2t.json")),
        "--n",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "-3/7");

    let o = looptool(&["avg", "--f", path_str(&data("const_one.json")), "--n", "5"]);
    assert_eq!(stdout(&o).trim(), "5");

    let o = looptool(&[
        "avg",
        "--f",
        path_str(&data("phi2_41.json")),
        "--n",
        "1",
        "--numeric-check",
        "40",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), "17/216 (unit sqrt(-3))");
    assert!(out.lines().nth(1).unwrap().starts_with("~ 0.0787037037"));
}

#[test]
fn avg_errors() {
    let dir = tempfile::tempdir().unwrap();
    let pole = dir.path().join("pole.json");
    std::fs::write(
        &pole,
        r#"{"numerator": {"0": "1"}, "denominator": {"0": "1", "1": "-1"}}"#,
    )
    .unwrap();
    assert_eq!(
        code(&looptool(&["avg", "--f", path_str(&pole), "--n", "4"])),
        2
    );

    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{not json").unwrap();
    assert_eq!(
        code(&looptool(&["avg", "--f", path_str(&junk), "--n", "4"])),
        1
    );
    assert_eq!(
        code(&looptool(&[
            "avg",
            "--f",
            path_str(&data("const_one.json")),
            "--n",
            "0"
        ])),
        1
    );
}

#[test]
fn knot_table_cross_checks() {
    let o = looptool(&[
        "knot", "--knot", "4_1", "--loop", "2", "--nmax", "40", "--mode", "all",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,coord_0,coord_1,unit");
    assert_eq!(lines.len(), 41);
    assert_eq!(lines[1], "1,17/216,0,sqrt(-3)");

    let o = looptool(&[
        "knot", "--knot", "4_1", "--loop", "3", "--nmax", "3", "--mode", "closed",
    ]);
    assert_eq!(stdout(&o).lines().nth(1).unwrap(), "1,-7/108,0");

    assert_eq!(
        code(&looptool(&["knot", "--knot", "4_1", "--nmax", "0"])),
        1
    );
    assert_eq!(
        code(&looptool(&["knot", "--knot", "7_3", "--nmax", "3"])),
        1
    );
}

#[test]
fn knot_52_rows() {
    let o = looptool(&[
        "knot", "--knot", "5_2", "--loop", "2", "--nmax", "8", "--mode", "all",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 9);
    assert_eq!(out.lines().next().unwrap(), "n,coord_0,coord_1,coord_2");
}

#[test]
fn knot_from_nz_and_diagrams() {
    let o = looptool(&[
        "knot",
        "--knot",
        path_str(&data("nz_synthetic.json")),
        "--diagrams",
        path_str(&data("two_loop_diagrams.json")),
        "--nmax",
        "3",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    // Pi(1) = 1/3: 1/324 + 1/216 + 1/8
    assert_eq!(stdout(&o).lines().nth(1).unwrap(), "1,43/324");
}

#[test]
fn reconstruct_fig8() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.json");
    let o = looptool(&[
        "reconstruct",
        "--values",
        path_str(&data("values_41_l2.csv")),
        "--roots",
        path_str(&data("roots_41.json")),
        "--ell",
        "2",
        "--r",
        "1",
        "--holdout",
        "17",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let (p, idx) = CoverPolynomial::from_json(&v).unwrap();
    assert_eq!(idx, 0);
    assert_eq!(p.terms().len(), 3);
    assert_eq!(v["unit"], "sqrt(-3)");
    assert!(String::from_utf8_lossy(&o.stderr).contains("55/1512"));

    let o = looptool(&[
        "reconstruct",
        "--values",
        path_str(&data("values_41_l3.csv")),
        "--roots",
        path_str(&data("roots_41.json")),
        "--ell",
        "3",
        "--r",
        "1",
    ]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("-317/238140*x"));
}

#[test]
fn reconstruct_failures() {
    let dir = tempfile::tempdir().unwrap();
    let roots = path_str(&data("roots_41.json")).to_string();
    let good = std::fs::read_to_string(data("values_41_l2.csv")).unwrap();
    let bad = dir.path().join("bad.csv");
    let corrupted: String = good
        .lines()
        .map(|l| {
            if l.starts_with("11,") {
                "11,1,0,sqrt(-3)".to_string()
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(&bad, corrupted).unwrap();
    let args = |values: &str| {
        vec![
            "reconstruct".to_string(),
            "--values".into(),
            values.into(),
            "--roots".into(),
            roots.clone(),
            "--ell".into(),
            "2".into(),
            "--r".into(),
            "1".into(),
        ]
    };
    let run = |a: Vec<String>| looptool(&a.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(code(&run(args(path_str(&bad)))), 5);

    let repeated = dir.path().join("repeated.csv");
    std::fs::write(&repeated, "n,coord_0,coord_1\n1,1,0\n1,1,0\n1,1,0\n2,3,0\n").unwrap();
    assert_eq!(code(&run(args(path_str(&repeated)))), 4);

    let mut wrong_r = args(path_str(&data("values_41_l2.csv")));
    wrong_r[8] = "2".into();
    assert_eq!(code(&run(wrong_r)), 1);
}

#[test]
fn verify_suites() {
    let o = looptool(&["verify", "--suite", "feynman", "--seed", "7"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "feynman: PASS (50 checks)");
    let o = looptool(&["verify", "--suite", "all", "--prec", "40"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn deterministic_and_precision_from_env() {
    let a = looptool(&["verify", "--suite", "circulant", "--seed", "3"]);
    let b = looptool(&["verify", "--suite", "circulant", "--seed", "3"]);
    assert_eq!(stdout(&a), stdout(&b));
    let o = Command::new(env!("CARGO_BIN_EXE_looptool"))
        .args([
            "avg",
            "--f",
            path_str(&data("const_one.json")),
            "--n",
            "2",
            "--numeric-check",
        ])
        .env("LOOPTOOL_PREC", "25")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o).lines().nth(1).unwrap(),
        "~ 2.00000000000000000000 + 0.00000000000000000000*i"
    );
}

#[test]
fn fixture_files_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.json");
    assert_eq!(
        code(&looptool(&[
            "fixture",
            "--knot",
            "4_1",
            "--out",
            path_str(&out)
        ])),
        0
    );
    assert_eq!(
        std::fs::read_to_string(&out).unwrap(),
        std::fs::read_to_string(data("4_1.json")).unwrap()
    );
    let from_file = looptool(&[
        "knot",
        "--knot",
        path_str(&out),
        "--loop",
        "3",
        "--nmax",
        "5",
    ]);
    let builtin = looptool(&["knot", "--knot", "4_1", "--loop", "3", "--nmax", "5"]);
    assert_eq!(stdout(&from_file), stdout(&builtin));

    let csv = dir.path().join("v.csv");
    looptool(&[
        "knot",
        "--knot",
        "4_1",
        "--loop",
        "2",
        "--nmax",
        "20",
        "--out",
        path_str(&csv),
    ]);
    assert_eq!(
        std::fs::read_to_string(&csv).unwrap(),
        std::fs::read_to_string(data("values_41_l2.csv")).unwrap()
    );
}
