use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn cct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cct"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compares with a golden file; `UPDATE_GOLDEN=1` rewrites it instead.
fn assert_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "golden file {name} differs");
}

/// Object keys as dotted paths in document order; arrays contribute `[]`
/// and their first element.
fn key_paths(value: &Value, prefix: &str, out: &mut Vec<String>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let path = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                out.push(path.clone());
                key_paths(v, &path, out);
            }
        }
        Value::Array(items) => {
            if let Some(first) = items.first() {
                key_paths(first, &format!("{prefix}[]"), out);
            }
        }
        _ => {}
    }
}

fn keys_of(json: &str) -> String {
    let value: Value = serde_json::from_str(json).unwrap();
    let mut out = Vec::new();
    key_paths(&value, "", &mut out);
    out.join("\n") + "\n"
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_subset_passes_with_timing() {
    let o = cct(&["verify", "--only", "AC1,AC6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("AC1  PASS")), "{out}");
    assert!(out.lines().any(|l| l.starts_with("AC6  PASS")), "{out}");
    assert!(out
        .lines()
        .filter(|l| l.starts_with("AC"))
        .all(|l| l.contains("s  ")));
}

#[test]
fn full_verify_reports_every_check() {
    let o = cct(&["verify"]);
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().filter(|l| l.starts_with("AC")).collect();
    assert_eq!(lines.len(), 9, "{out}");
    let failed: Vec<&str> = lines.iter().filter(|l| l.contains(" FAIL ")).copied().collect();
    // The diagonal asymptotics criterion does not hold for these formulas.
    assert_eq!(failed.len(), 1, "{out}");
    assert!(failed[0].starts_with("AC7"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("AC7"));
}

#[test]
fn broken_gate_names_failed_invariant() {
    let o = cct(&["verify", "--only", "AC1", "--break-gate", "toffoli"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("AC1  FAIL"), "{out}");
    assert!(out.contains("toffoli: unitarity defect"), "{out}");
}

#[test]
fn unknown_check_is_usage_error() {
    let o = cct(&["verify", "--only", "AC42"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("AC42"));
}

#[test]
fn corrupted_config_names_field() {
    let dir = tempfile::tempdir().unwrap();
    // |alpha|^2 + |beta|^2 = 1.2
    let config = write_config(
        dir.path(),
        r#"{"alpha": [0.6, 0.0], "beta": [0.9165151389911680, 0.0]}"#,
    );
    let o = cct(&["run", "--config", &config]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("alpha/beta") && err.contains("1.2"), "{err}");
}

#[test]
fn malformed_config_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "{\n  \"M\": 4,\n  \"N\": [\n}");
    let o = cct(&["sweep", "--config", &config, "--values", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn missing_config_file_is_config_error() {
    let o = cct(&["run", "--config", "/nonexistent/cct.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identity_run_passes() {
    let o = cct(&["run", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["results"]["pass"], true);
    assert!(matches!(v["results"]["outcome"].as_u64(), Some(0 | 1)));
    assert_eq!(v["seed"], 3);
    assert_eq!(v["config"]["seed"], 3);
}

#[test]
fn teleportation_run_flags_separable_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"gamma": [0, 0], "delta": [1, 0], "angles": {"phi": 0.4, "theta": 1.3, "varphi": -2.0}}"#,
    );
    let out = dir.path().join("run.json");
    let o = cct(&["run", "--config", &config, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["results"]["schmidt_rank"], 1);
    assert_eq!(v["results"]["separable"], true);
    assert_eq!(v["results"]["notes"][0], "separable output");
    assert_golden("run_report_keys.txt", &keys_of(&text));
}

#[test]
fn bell_run_has_no_outcome() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"mode": "bell", "class": 0, "sign": -1, "c0": [0.6, 0], "c1": [0, 0.8]}"#,
    );
    let o = cct(&["run", "--config", &config]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["results"]["outcome"].is_null());
    assert_eq!(v["config"]["sign"], -1);
}

#[test]
fn single_value_sweep() {
    let o = cct(&["sweep", "--values", "7", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].starts_with("7,7,7,7,"));
}

#[test]
fn sweep_csv_headers_are_stable() {
    let general = stdout(&cct(&[
        "sweep", "--axis", "diag", "--values", "5,10", "--format", "csv",
    ]));
    assert_golden(
        "sweep_general_header.csv",
        &(general.lines().next().unwrap().to_string() + "\n"),
    );
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"mode": "bell"}"#);
    let bell = stdout(&cct(&[
        "sweep", "--config", &config, "--axis", "N", "--values", "5", "--format", "csv",
    ]));
    assert_golden(
        "sweep_bell_header.csv",
        &(bell.lines().next().unwrap().to_string() + "\n"),
    );
}

#[test]
fn diag_sweep_zeta_columns_decrease() {
    let out = stdout(&cct(&[
        "sweep",
        "--axis",
        "diag",
        "--values",
        "5,10,20,40",
        "--format",
        "csv",
    ]));
    let mut lines = out.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    for name in ["zeta0", "zeta1"] {
        let col = header.iter().position(|h| *h == name).unwrap();
        assert!(rows.windows(2).all(|w| w[1][col] < w[0][col]), "{name}");
    }
    // 17 significant digits round-trip
    let cell = out.lines().nth(1).unwrap().split(',').nth(4).unwrap();
    assert_eq!(
        cell.split('e')
            .next()
            .unwrap()
            .replace('.', "")
            .trim_start_matches('-')
            .len(),
        17
    );
}

#[test]
fn sweep_json_keys_are_stable() {
    let out = stdout(&cct(&["sweep", "--axis", "K", "--values", "4,8"]));
    assert_golden("sweep_report_keys.txt", &keys_of(&out));
}

#[test]
fn montecarlo_zero_trials_is_usage_error() {
    let o = cct(&["montecarlo", "--trials", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("trials"));
}

#[test]
fn montecarlo_is_byte_identical_for_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let o = cct(
            &["montecarlo", "--seed", "11", "--trials", "20000", "--out", "OUT"].map(|s| {
                if s == "OUT" {
                    path.to_str().unwrap()
                } else {
                    s
                }
            }),
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    // the echoed output path differs, everything else must not
    let strip = |p: &Path| {
        let mut v: Value = serde_json::from_slice(&std::fs::read(p).unwrap()).unwrap();
        v["config"]["output"] = Value::Null;
        serde_json::to_vec(&v).unwrap()
    };
    assert_eq!(strip(&a), strip(&b));
    let first = stdout(&cct(&["montecarlo", "--seed", "11", "--trials", "5000"]));
    let second = stdout(&cct(&["montecarlo", "--seed", "11", "--trials", "5000"]));
    assert_eq!(first.as_bytes(), second.as_bytes());
    assert_golden("montecarlo_report_keys.txt", &keys_of(&first));
}

#[test]
fn montecarlo_cct_matches_analytic_abort_rate() {
    let out = stdout(&cct(&[
        "montecarlo",
        "--experiment",
        "cct",
        "--seed",
        "5",
        "--trials",
        "100000",
    ]));
    let v: Value = serde_json::from_str(&out).unwrap();
    let r = &v["results"]["report"];
    let estimate = r["abort_rate_estimate"].as_f64().unwrap();
    let expected = r["expected_abort_rate"].as_f64().unwrap();
    let sigma = (expected * (1.0 - expected) / 1e5).sqrt();
    assert!(
        (estimate - expected).abs() < 4.0 * sigma,
        "{estimate} vs {expected}"
    );
    assert!((r["conditional_fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(r["counterfactual_violations"], 0);
}

#[test]
fn montecarlo_gate_csv() {
    let o = cct(&[
        "montecarlo",
        "--experiment",
        "cqz",
        "--model",
        "coherent",
        "--trials",
        "2000",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert_golden(
        "montecarlo_header.csv",
        &(out.lines().next().unwrap().to_string() + "\n"),
    );
    assert_eq!(out.lines().count(), 2);
}

#[test]
fn unknown_model_is_config_error() {
    let o = cct(&["montecarlo", "--experiment", "qz", "--model", "classical"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("model"));
}
