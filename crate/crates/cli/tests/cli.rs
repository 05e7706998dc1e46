use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_halfspace-casimir"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and numeric rows of CSV output, metadata lines dropped.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn reflection_defaults() {
    let o = run(&["reflection"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().starts_with("# program: halfspace-casimir"));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["gamma", "n_mm", "n_mp", "n_nt", "n_t", "total", "error_estimate"]);
    assert_eq!(rows.len(), 81);
    assert_eq!(num(&rows[0][0]), 1e-2);
    assert_eq!(num(&rows[80][0]), 1e2);
    for r in &rows {
        let v: Vec<f64> = r.iter().map(|s| num(s)).collect();
        assert_eq!(v[3], v[1] + 2.0 * v[2]);
        assert_eq!(v[5], v[3] + v[4]);
    }
}

#[test]
fn zero_coupling_gives_zero_reflection() {
    let o = run(&["reflection", "--lambda", "0", "--gamma-points", "5"]);
    assert!(o.status.success());
    let (_, rows) = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 5);
    for r in rows {
        assert!(r[1..].iter().all(|s| num(s) == 0.0), "{r:?}");
    }
}

#[test]
fn json_and_csv_agree_and_reruns_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("n.csv");
    let json = dir.path().join("n.json");
    let args = ["reflection", "--gamma-min", "0.1", "--gamma-max", "10", "--gamma-points", "7"];
    let mut a = args.to_vec();
    a.extend(["--out", path_str(&csv)]);
    assert!(run(&a).status.success());
    let first = fs::read(&csv).unwrap();
    assert!(run(&a).status.success());
    assert_eq!(first, fs::read(&csv).unwrap());

    let mut b = args.to_vec();
    b.extend(["--format", "json", "--out", path_str(&json)]);
    assert!(run(&b).status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let (header, rows) = csv_rows(&String::from_utf8(first).unwrap());
    let objs = v.as_array().unwrap();
    assert_eq!(objs.len(), rows.len());
    for (obj, row) in objs.iter().zip(&rows) {
        for (k, s) in header.iter().zip(row) {
            assert_eq!(obj[k].as_f64().unwrap(), num(s), "{k}");
        }
    }
}

#[test]
fn constant_coupling_energy_is_never_stable() {
    let o = run(&["energy", "--mode", "constant", "--mu", "1", "--l-min", "0.5", "--l-max", "5", "--l-points", "4"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let (header, rows) = csv_rows(&stdout(&o));
    let stable = header.iter().position(|h| h == "stable").unwrap();
    let imag = header.iter().position(|h| h == "E_imag").unwrap();
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert_eq!(r[stable], "false");
        assert!(num(&r[imag]) > 0.0);
    }
}

#[test]
fn repeated_mu_and_single_separation() {
    let o = run(&["energy", "--mu", "0.5,0.5", "--l-min", "2", "--l-max", "2", "--l-points", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = csv_rows(&stdout(&o));
    assert_eq!(header, ["mu", "L", "lambda_L", "eta", "E_real", "E_imag", "E_error", "stable"]);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0], rows[1]);
    assert_eq!(rows[0][7], "true");
    assert!(num(&rows[0][3]) > 0.0);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# sweep\ngamma_points = 3\ngamma-min = 1\ngamma-max = 100\nlambda = 2\n").unwrap();
    let c = path_str(&cfg);

    let (_, rows) = csv_rows(&stdout(&run(&["reflection", "--config", c])));
    assert_eq!(rows.iter().map(|r| num(&r[0])).collect::<Vec<_>>(), [1.0, 10.0, 100.0]);

    let (_, flagged) = csv_rows(&stdout(&run(&["reflection", "--config", c, "--lambda", "1"])));
    assert_eq!(flagged.len(), 3);
    for (a, b) in rows.iter().zip(&flagged) {
        let (ta, tb) = (num(&a[5]), num(&b[5]));
        assert!((ta - 4.0 * tb).abs() <= 4.0 * f64::EPSILON * ta.abs());
    }
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    fs::write(&bad, "colour = blue\n").unwrap();
    let missing = dir.path().join("missing.conf");
    let cases: Vec<Vec<&str>> = vec![
        vec!["reflection", "--no-such-flag"],
        vec!["reflection", "--format", "xml"],
        vec!["reflection", "--mass", "-1"],
        vec!["reflection", "--rel-tol", "0"],
        vec!["reflection", "--gamma-min", "10", "--gamma-max", "1"],
        vec!["energy", "--l-min", "0"],
        vec!["reflection", "--config", path_str(&bad)],
        vec!["reflection", "--config", path_str(&missing)],
    ];
    for args in cases {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn verify_reports_and_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let o = run(&["verify", "--mc-samples", "200000", "--format", "json", "--out", path_str(&report)]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("[PASS] 9 ")));
    assert!(text.lines().any(|l| l.starts_with("[FAIL] 7b")));
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert!(rows.iter().any(|r| r["id"] == "12c" && r["passed"] == true));
}

#[test]
fn magnitude_flag_drops_the_sign() {
    let args = ["reflection", "--gamma-points", "4"];
    let (_, signed) = csv_rows(&stdout(&run(&args)));
    let mut m = args.to_vec();
    m.push("--magnitude");
    let o = run(&m);
    assert!(stdout(&o).contains("# values: magnitude"));
    let (_, abs) = csv_rows(&stdout(&o));
    for (s, a) in signed.iter().zip(&abs) {
        for (x, y) in s.iter().zip(a) {
            assert_eq!(num(x).abs(), num(y));
        }
    }
}
