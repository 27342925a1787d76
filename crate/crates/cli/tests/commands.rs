use std::collections::HashMap;
use std::process::{Command, Output};

use qmotzkin::ascpoly::QModelParams;
use qmotzkin::motzkin::{enumerate_paths, PathMeasure, WeightModel};
use serde_json::Value;

fn qmotzkin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmotzkin")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV output, header and comment lines dropped.
fn rows(text: &str) -> Vec<Vec<String>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    lines.next().expect("column header");
    lines.map(split_csv).collect()
}

fn split_csv(line: &str) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut quoted = false;
    for ch in line.chars() {
        match ch {
            '"' => quoted = !quoted,
            ',' if !quoted => out.push(String::new()),
            _ => out.last_mut().unwrap().push(ch),
        }
    }
    out
}

fn float(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn fixed_seed_gives_identical_output() {
    for args in [
        ["sample", "--L", "6", "--count", "20", "--seed", "9"],
        ["chain", "--L", "30", "--count", "4", "--seed", "9"],
    ] {
        let a = qmotzkin(&args);
        let b = qmotzkin(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
    let other = qmotzkin(&["sample", "--L", "6", "--count", "20", "--seed", "10"]);
    assert_ne!(qmotzkin(&["sample", "--L", "6", "--count", "20", "--seed", "9"]).stdout, other.stdout);
}

#[test]
fn enumerate_lists_motzkin_paths() {
    let out = qmotzkin(&["enumerate", "--model", "unit", "--L", "4"]);
    assert!(out.status.success());
    let r = rows(&stdout(&out));
    assert_eq!(r.len(), 9);
    assert!(r.iter().all(|row| float(&row[1]) == 1.0));

    let r = rows(&stdout(&qmotzkin(&["enumerate", "--L", "0"])));
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][0], "0");
}

#[test]
fn enumerated_probabilities_sum_to_the_endpoint_mass() {
    let (m, n, l) = (1, 2, 5);
    let out = qmotzkin(&["enumerate", "--L", "5", "--from", "1", "--to", "2", "--q", "0.4", "--sigma", "0.6"]);
    let r = rows(&stdout(&out));
    assert_eq!(r.len(), enumerate_paths(l, m, n).unwrap().len());
    let total: f64 = r.iter().map(|row| float(&row[2])).sum();
    let model = WeightModel::q_model(QModelParams::new(0.4, 0.6, 0.3, 0.3).unwrap());
    let pm = PathMeasure::new(&model, l, 100_000, 1e-12).unwrap();
    let want = pm.endpoint_law()[m][n];
    assert!((total / want - 1.0).abs() < 1e-12, "{total} vs {want}");
}

#[test]
fn sample_frequencies_match_enumeration() {
    let draws = 200_000;
    let out = qmotzkin(&["sample", "--L", "2", "--count", &draws.to_string(), "--seed", "3"]);
    assert!(out.status.success());
    let mut counts: HashMap<String, usize> = HashMap::new();
    for row in rows(&stdout(&out)) {
        *counts.entry(row[3].clone()).or_default() += 1;
    }
    let model = WeightModel::q_model(QModelParams::new(0.5, 0.7, 0.3, 0.3).unwrap());
    let pm = PathMeasure::new(&model, 2, 100_000, 1e-12).unwrap();
    let mut checked = 0;
    for a in 0..=6usize {
        for b in a.saturating_sub(2)..=a + 2 {
            for p in enumerate_paths(2, a, b).unwrap() {
                let prob = pm.path_probability(&p);
                if prob < 1e-3 {
                    continue;
                }
                let key = qmotzkin::io::format_path(&p);
                let freq = *counts.get(&key).unwrap_or(&0) as f64 / draws as f64;
                let se = (prob * (1.0 - prob) / draws as f64).sqrt();
                assert!((freq - prob).abs() < 4.0 * se, "{key}: {freq} vs {prob}");
                checked += 1;
            }
        }
    }
    assert!(checked >= 10);
}

#[test]
fn chain_steps_are_unit() {
    for side in ["x", "y"] {
        let out = qmotzkin(&["chain", "--L", "200", "--count", "5", "--side", side, "--seed", "4"]);
        assert!(out.status.success());
        let r = rows(&stdout(&out));
        assert_eq!(r.len(), 5 * 201);
        for w in r.windows(2) {
            if w[0][0] == w[1][0] {
                let (a, b): (i64, i64) = (w[0][2].parse().unwrap(), w[1][2].parse().unwrap());
                assert!((a - b).abs() <= 1);
            }
        }
    }
}

#[test]
fn verify_passes_and_detects_an_injected_fault() {
    let ok = qmotzkin(&["verify"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(rows(&stdout(&ok)).iter().all(|r| r[3] == "true"));

    let bad = qmotzkin(&["verify", "--inject-fault", "--format", "json"]);
    assert_eq!(bad.status.code(), Some(1));
    let doc: Value = serde_json::from_slice(&bad.stdout).unwrap();
    let passes: Vec<&Value> = doc["rows"].as_array().unwrap().iter().map(|r| &r["pass"]).collect();
    assert!(passes.iter().all(|p| p.is_boolean()));
    assert_eq!(passes[0], &Value::Bool(false));
    assert!(passes[1..].iter().all(|p| **p == Value::Bool(true)));
}

#[test]
fn locallimit_tables() {
    let out = qmotzkin(&["locallimit", "--regime", "fixed-q"]);
    assert!(out.status.success());
    let r = rows(&stdout(&out));
    let ns: Vec<&str> = r.iter().map(|row| row[0].as_str()).collect();
    assert_eq!(ns, ["400", "2500", "10000"]);
    let errs: Vec<f64> = r.iter().map(|row| float(&row[6])).collect();
    assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
    assert!(r.iter().all(|row| row[5] == r[0][5]));

    let out = qmotzkin(&["locallimit", "--regime", "q-to-1", "--x", "0", "--y", "0", "--N", "400,900"]);
    assert!(out.status.success());
    let r = rows(&stdout(&out));
    assert_eq!(r.len(), 2);
    assert_eq!(r[0][5], r[1][5]);
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# test config\nq = 0.2\nsigma = 0.4\nformat = json\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let out_path = dir.path().join("out.json");
    let out = qmotzkin(&["specialfn", "--config", cfg, "--q", "0.6", "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["config"]["q"], "0.6");
    assert_eq!(doc["config"]["sigma"], "0.4");
    assert_eq!(doc["config"]["rho0"], "0.3");
    assert_eq!(doc["command"], "specialfn");

    let csv = stdout(&qmotzkin(&["specialfn", "--config", cfg, "--format", "csv"]));
    assert!(csv.starts_with("# qmotzkin specialfn\n"));
    assert!(csv.lines().any(|l| l == "# q=0.2"));
}

#[test]
fn exit_codes() {
    assert_eq!(qmotzkin(&["enumerate", "--L", "15"]).status.code(), Some(2));
    assert_eq!(qmotzkin(&["enumerate", "--sigma", "1.5"]).status.code(), Some(3));
    assert_eq!(qmotzkin(&["enumerate", "--format", "xml"]).status.code(), Some(3));
    assert_eq!(qmotzkin(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(qmotzkin(&["sample", "--L", "abc"]).status.code(), Some(3));
    assert_eq!(qmotzkin(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(qmotzkin(&["verify", "--config", cfg.to_str().unwrap()]).status.code(), Some(3));
    assert_eq!(qmotzkin(&["verify", "--config", "/nonexistent/run.cfg"]).status.code(), Some(3));
}
