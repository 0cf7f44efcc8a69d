use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn survrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_survrank")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = survrank(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Synthetic cohort of `n` subjects under `dir/synth`.
fn synth(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let out = dir.join("synth");
    ok(&["synth", "--n", &n.to_string(), "--seed", &seed.to_string(), "--output-dir", path_str(&out)]);
    out.join("cohort.csv")
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    names
}

#[test]
fn synth_is_byte_deterministic() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        ok(&["synth", "--n", "728", "--sparsity", "3", "--seed", "7", "--output-dir", path_str(d)]);
    }
    for f in ["cohort.csv", "truth.json", "schema.toml"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let rows = fs::read_to_string(a.join("cohort.csv")).unwrap().lines().count();
    assert_eq!(rows, 729);
    let truth = json(a.join("truth.json"));
    assert_eq!(truth["support"].as_array().unwrap().len(), 3);
    assert_eq!(truth["seed"], 7);
}

#[test]
fn synth_below_minimum_is_a_validation_error() {
    let tmp = TempDir::new().unwrap();
    let out = survrank(&["synth", "--n", "5", "--output-dir", path_str(tmp.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(listing(tmp.path()), vec!["manifest.json"]);
    let manifest = json(tmp.path().join("manifest.json"));
    assert_eq!(manifest["success"], false);
    assert!(manifest["outputs"].as_array().unwrap().is_empty());
}

#[test]
fn fit_with_heavy_penalty_shrinks_to_zero() {
    let tmp = TempDir::new().unwrap();
    let cohort = synth(tmp.path(), 200, 1);
    let out_dir = tmp.path().join("fit");
    let out = ok(&["fit", "--input", path_str(&cohort), "--lambda", "1000", "--output-dir", path_str(&out_dir)]);
    let model = json(out_dir.join("model.json"));
    let norm: f64 = model["weights"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap().abs()).sum();
    assert!(norm < 1e-3, "|w|_1 = {norm}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("|w|_1"));
    assert!(out_dir.join("history.csv").exists());
}

#[test]
fn fit_default_lambda_gives_finite_weights() {
    let tmp = TempDir::new().unwrap();
    let cohort = synth(tmp.path(), 200, 2);
    let out_dir = tmp.path().join("fit");
    ok(&["fit", "--input", path_str(&cohort), "--lambda", "0.01", "--output-dir", path_str(&out_dir)]);
    let model = json(out_dir.join("model.json"));
    assert!(model["weights"].as_array().unwrap().iter().all(|v| v.as_f64().unwrap().is_finite()));
}

#[test]
fn missing_input_writes_no_outputs() {
    let tmp = TempDir::new().unwrap();
    let out_dir = tmp.path().join("out");
    let out = survrank(&["fit", "--input", "/nonexistent/cohort.csv", "--output-dir", path_str(&out_dir)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(listing(&out_dir), vec!["manifest.json"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/cohort.csv"));
}

#[test]
fn fit_without_comparable_pairs_is_a_runtime_error() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("c.csv");
    fs::write(&csv, "id,time,event,a\n1,5,1,0.1\n2,5,1,0.9\n3,5,0,0.3\n").unwrap();
    let out = survrank(&["fit", "--input", path_str(&csv), "--output-dir", path_str(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(tmp.path().join("manifest.json"))["exit_code"], 2);
}

#[test]
fn bad_flags_exit_with_validation_status() {
    assert_eq!(survrank(&["fit", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(survrank(&["--help"]).status.code(), Some(0));
}

#[test]
fn single_run_bootstrap_has_degenerate_spread() {
    let tmp = TempDir::new().unwrap();
    let cohort = synth(tmp.path(), 300, 3);
    let out_dir = tmp.path().join("b");
    ok(&["bootstrap", "--input", path_str(&cohort), "--B", "1", "--output-dir", path_str(&out_dir)]);
    let s = json(out_dir.join("summary.json"));
    for key in ["combined_p", "c_mean", "c_std", "aggregated_weights", "formula", "per_run"] {
        assert!(!s[key].is_null(), "{key}");
    }
    assert_eq!(s["c_std"], 0.0);
    assert_eq!(s["runs"], 1);
}

#[test]
fn bootstrap_outputs_and_formula_terms() {
    let tmp = TempDir::new().unwrap();
    let cohort = synth(tmp.path(), 400, 4);
    let out_dir = tmp.path().join("b");
    ok(&["bootstrap", "--input", path_str(&cohort), "--B", "8", "--K", "3", "--seed", "2", "--output-dir", path_str(&out_dir)]);
    assert_eq!(
        listing(&out_dir),
        [
            "km_high.csv",
            "km_low.csv",
            "manifest.json",
            "risk_formula.json",
            "runs.csv",
            "stratification.json",
            "summary.json",
            "weights.csv"
        ]
    );
    assert_eq!(json(out_dir.join("risk_formula.json"))["terms"].as_array().unwrap().len(), 3);
    assert_eq!(fs::read_to_string(out_dir.join("runs.csv")).unwrap().lines().count(), 9);
    let manifest = json(out_dir.join("manifest.json"));
    assert_eq!(manifest["success"], true);
    for o in manifest["outputs"].as_array().unwrap() {
        assert!(out_dir.join(o["path"].as_str().unwrap()).exists());
    }
}

#[test]
fn compare_table_has_three_rows() {
    let tmp = TempDir::new().unwrap();
    let cohort = synth(tmp.path(), 300, 5);
    let out_dir = tmp.path().join("c");
    ok(&["compare", "--input", path_str(&cohort), "--B", "4", "--output-dir", path_str(&out_dir)]);
    let csv = fs::read_to_string(out_dir.join("comparison.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "method,combined_p,c_mean,c_std,failed_runs");
    let methods: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(methods, ["proposed", "ssvm", "cox_l1"]);
    assert_eq!(json(out_dir.join("comparison.json"))["paired_splits"], true);
    assert_eq!(fs::read_to_string(out_dir.join("splits.csv")).unwrap().lines().count(), 5);
}

/// A few hand-made records; the first is M = 3, LVI = 1, HTT6_MLC = 0.
fn fixture_cohort(dir: &Path) -> PathBuf {
    let csv = dir.join("fixture.csv");
    fs::write(
        &csv,
        "id,time,event,M,LVI,HTT6_MLC\n\
         p1,20,1,3,1,0\n\
         p2,40,1,2,1,1\n\
         p3,90,0,1,0,0\n\
         p4,30,1,2,0,1\n\
         p5,120,0,1,0,0\n\
         p6,60,1,1,1,0\n",
    )
    .unwrap();
    csv
}

fn fixture_formula(dir: &Path) -> PathBuf {
    let f = dir.join("formula.json");
    fs::write(
        &f,
        r#"{"terms": [
            {"covariate": "M", "coefficient": 0.26},
            {"covariate": "LVI", "coefficient": 0.48},
            {"covariate": "HTT6_MLC", "coefficient": 0.38}
        ], "bias": 0.0}"#,
    )
    .unwrap();
    f
}

#[test]
fn apply_risk_on_handmade_formula() {
    let tmp = TempDir::new().unwrap();
    let (cohort, formula) = (fixture_cohort(tmp.path()), fixture_formula(tmp.path()));
    let out_dir = tmp.path().join("r");
    ok(&["apply-risk", "--input", path_str(&cohort), "--formula", path_str(&formula), "--output-dir", path_str(&out_dir)]);
    let risks = fs::read_to_string(out_dir.join("risks.csv")).unwrap();
    let rows: Vec<&str> = risks.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    let first: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(first[0], "p1");
    assert!((first[1].parse::<f64>().unwrap() - 1.26).abs() < 1e-12);
    assert_eq!(first[2], "high");
    assert!(json(out_dir.join("stratification.json"))["logrank"]["p_value"].is_number());
}

#[test]
fn apply_risk_with_missing_covariate() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("c.csv");
    fs::write(&csv, "id,time,event,M,LVI\n1,5,1,1,0\n2,7,1,2,1\n").unwrap();
    let out = survrank(&["apply-risk", "--input", path_str(&csv), "--formula", path_str(&fixture_formula(tmp.path())), "--output-dir", path_str(tmp.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("HTT6_MLC"));
}

#[test]
fn identical_records_give_a_single_stratum_diagnostic() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("same.csv");
    fs::write(&csv, "id,time,event,M,LVI,HTT6_MLC\na,10,1,2,1,0\nb,20,1,2,1,0\nc,30,0,2,1,0\nd,40,1,2,1,0\n").unwrap();
    let out_dir = tmp.path().join("r");
    let out = survrank(&["apply-risk", "--input", path_str(&csv), "--formula", path_str(&fixture_formula(tmp.path())), "--output-dir", path_str(&out_dir)]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("risk group empty"), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(listing(&out_dir), vec!["manifest.json"]);
}

#[test]
fn univariate_binary_with_identical_outcomes_has_unit_p() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("u.csv");
    fs::write(&csv, "id,time,event,LVI\n1,10,1,0\n2,10,1,1\n3,25,0,0\n4,25,0,1\n5,40,1,0\n6,40,1,1\n").unwrap();
    let out_dir = tmp.path().join("u");
    ok(&["univariate", "--input", path_str(&csv), "--covariate", "LVI", "--output-dir", path_str(&out_dir)]);
    let doc = json(out_dir.join("univariate.json"));
    assert_eq!(doc["logrank"]["p_value"], 1.0);
    assert_eq!(doc["logrank"]["chi_square"], 0.0);
    assert!(out_dir.join("km_group0.csv").exists() && out_dir.join("km_group1.csv").exists());
}

#[test]
fn univariate_median_split_detects_a_driving_covariate() {
    let tmp = TempDir::new().unwrap();
    let cohort = synth(tmp.path(), 700, 11);
    let out_dir = tmp.path().join("u");
    ok(&["univariate", "--input", path_str(&cohort), "--covariate", "M", "--output-dir", path_str(&out_dir)]);
    let p = json(out_dir.join("univariate.json"))["logrank"]["p_value"].as_f64().unwrap();
    assert!(p < 0.01, "p = {p}");
}

#[test]
fn univariate_empty_group_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("u.csv");
    fs::write(&csv, "id,time,event,size\n1,10,1,1.5\n2,20,1,2.5\n3,30,0,3.5\n").unwrap();
    let out = survrank(&["univariate", "--input", path_str(&csv), "--covariate", "size", "--threshold", "9", "--output-dir", path_str(tmp.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
}

#[test]
fn km_censor_at_truncates_follow_up() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("k.csv");
    fs::write(&csv, "id,time,event\n1,10,1\n2,50,1\n3,70,1\n4,200,0\n").unwrap();
    let out_dir = tmp.path().join("k");
    ok(&["km", "--input", path_str(&csv), "--censor-at", "60", "--output-dir", path_str(&out_dir)]);
    let km = fs::read_to_string(out_dir.join("km.csv")).unwrap();
    let last: Vec<&str> = km.lines().last().unwrap().split(',').collect();
    // The event at 70 becomes a censoring at 60, so the curve stops at the event at 50.
    assert_eq!((last[0], last[3]), ("50", "0.5"), "{km}");

    let full = tmp.path().join("full");
    ok(&["km", "--input", path_str(&csv), "--output-dir", path_str(&full)]);
    let km = fs::read_to_string(full.join("km.csv")).unwrap();
    let last: Vec<&str> = km.lines().last().unwrap().split(',').collect();
    assert_eq!((last[0], last[3]), ("70", "0.25"), "{km}");
}

#[test]
fn logrank_fixture_and_label_check() {
    let tmp = TempDir::new().unwrap();
    let csv = tmp.path().join("l.csv");
    fs::write(&csv, "id,time,event,group\n1,1,1,A\n2,3,1,A\n3,2,1,B\n4,4,1,B\n").unwrap();
    let out_dir = tmp.path().join("l");
    ok(&["logrank", "--input", path_str(&csv), "--output-dir", path_str(&out_dir)]);
    let doc = json(out_dir.join("logrank.json"));
    assert!((doc["logrank"]["chi_square"].as_f64().unwrap() - 0.6154).abs() < 1e-4);
    assert!((doc["logrank"]["p_value"].as_f64().unwrap() - 0.4328).abs() < 1e-4);

    let three = tmp.path().join("three.csv");
    fs::write(&three, "id,time,event,group\n1,1,1,A\n2,3,1,B\n3,2,1,C\n").unwrap();
    let out = survrank(&["logrank", "--input", path_str(&three), "--output-dir", path_str(tmp.path())]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let tmp = TempDir::new().unwrap();
    let cohort = synth(tmp.path(), 200, 6);
    let cfg = tmp.path().join("cfg.toml");
    fs::write(&cfg, "seed = 9\n[train]\nlambda = 1000.0\n").unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&["fit", "--input", path_str(&cohort), "--config", path_str(&cfg), "--output-dir", path_str(&a)]);
    ok(&["fit", "--input", path_str(&cohort), "--config", path_str(&cfg), "--lambda", "0.01", "--output-dir", path_str(&b)]);
    let norm = |d: &Path| -> f64 {
        json(d.join("model.json"))["weights"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap().abs()).sum()
    };
    assert!(norm(&a) < 1e-3);
    assert!(norm(&b) > 0.1);
    assert_eq!(json(a.join("manifest.json"))["seed"], 9);

    fs::write(&cfg, "[train]\nlamda = 1.0\n").unwrap();
    let out = survrank(&["fit", "--input", path_str(&cohort), "--config", path_str(&cfg), "--output-dir", path_str(tmp.path())]);
    assert_eq!(out.status.code(), Some(1));
}
