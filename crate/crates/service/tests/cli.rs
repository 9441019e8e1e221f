mod support;

use serde_json::Value;
use support::*;

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

#[test]
fn rank_table2_prints_a_ranked_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = mcdm(
        dir.path(),
        &[
            "rank",
            "--matrix",
            &path("table2.csv"),
            "--weights",
            &path("table1.json"),
            "--stage",
            "weighted",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().filter(|l| l.contains("Lakhs")).collect();
    assert_eq!(rows.len(), 9, "{text}");
    // rows are in rank order
    assert!(rows[0].contains("EV (11-15 Lakhs)"), "{text}");
    assert!(rows[4].contains("HEV (19-25 Lakhs)"), "{text}");
    assert!(rows[8].contains("ICEV (11-15 Lakhs)"), "{text}");
}

#[test]
fn weights_of_a_consistent_survey() {
    let dir = tempfile::tempdir().unwrap();
    let out = mcdm(
        dir.path(),
        &[
            "weights",
            &path("consistent/survey.json"),
            "--criteria",
            &path("consistent/criteria.json"),
            "--format",
            "json",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let weights: Vec<f64> = serde_json::from_value(report["weights"].clone()).unwrap();
    for (got, want) in weights.iter().zip([4.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0]) {
        assert!((got - want).abs() <= 1e-9, "{weights:?}");
    }
    assert_eq!(report["xi_star"], 0.0);
    assert_eq!(
        report["criteria"],
        serde_json::json!(["price", "range", "comfort"])
    );
}

#[test]
fn csv_output_has_a_header_and_one_row_per_alternative() {
    let dir = tempfile::tempdir().unwrap();
    let out = mcdm(
        dir.path(),
        &["rank", "--matrix", &path("table2.json"), "--format", "csv"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("alternative,s_plus,s_minus,score,rank"),
        "{text}"
    );
    assert_eq!(lines.count(), 9);
}

#[test]
fn missing_config_exits_with_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = mcdm(dir.path(), &["pipeline", "--config", "missing.json"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("code: FileNotFound"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn invalid_survey_reports_every_violation() {
    let dir = tempfile::tempdir().unwrap();
    let survey = dir.path().join("bad.json");
    std::fs::write(
        &survey,
        r#"{"respondent": "bad", "best": 0, "worst": 2, "bo": [1, 2, 11], "ow": [5, 2, 1]}"#,
    )
    .unwrap();
    let out = mcdm(
        dir.path(),
        &[
            "weights",
            "bad.json",
            "--criteria",
            &path("consistent/criteria.json"),
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("code: ValidationFailed"), "{err}");
    assert!(
        err.contains("OutOfScale") && err.contains("BestWorstMismatch"),
        "{err}"
    );
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(mcdm(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(mcdm(dir.path(), &["rank"]).status.code(), Some(1));
    assert_eq!(mcdm(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_run_is_not_found() {
    let dir = tempfile::tempdir().unwrap();
    let out = mcdm(
        dir.path(),
        &["export", "--run", "0000000000000000", "--store", "store"],
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("code: UnknownRun"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn pipeline_sensitivity_and_export_share_a_store() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("store").display().to_string();
    let out = mcdm(
        dir.path(),
        &[
            "pipeline",
            "--config",
            &path("pipeline.json"),
            "--store",
            &store,
            "--format",
            "json",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let run: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let run_id = run["run_id"].as_str().unwrap().to_string();
    assert_eq!(run_id.len(), 16);
    assert_eq!(run["created_at"], "2024-01-01T00:00:00Z");
    // sources are recorded relative to the config file
    assert_eq!(run["inputs"][0]["source"], "criteria.json");

    let out = mcdm(
        dir.path(),
        &[
            "sensitivity",
            "--run",
            &run_id,
            "--criterion",
            "cost_of_ownership",
            "--deltas",
            "-0.2,0,0.1",
            "--threshold",
            "down",
            "--store",
            &store,
            "--format",
            "json",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["entries"].as_array().unwrap().len(), 3);
    assert_eq!(report["entries"][0]["flipped"], true);
    assert_eq!(report["entries"][1]["flipped"], false);
    assert_eq!(report["threshold"]["flip"]["new_top"], "EV (19-25 Lakhs)");

    let out = mcdm(
        dir.path(),
        &[
            "export", "--run", &run_id, "--store", &store, "--format", "json",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let exported: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(exported, run);
}

#[test]
fn store_can_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_mcdm"))
        .current_dir(dir.path())
        .env("MCDM_STORE", dir.path().join("env-store"))
        .args(["pipeline", "--config", &path("pipeline.json")])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("env-store").is_dir());
}

#[test]
fn tco_reports_every_segment() {
    let dir = tempfile::tempdir().unwrap();
    let out = mcdm(
        dir.path(),
        &["tco", "--fleet", &path("vehicles.json"), "--format", "json"],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let segments: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!segments.as_array().unwrap().is_empty());
}
