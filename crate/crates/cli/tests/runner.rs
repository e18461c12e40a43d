use std::fs;

use tempfile::TempDir;
use thermolimit_cli::config::Format;
use thermolimit_cli::runner::{run, Overrides};
use thermolimit_cli::table::ResultTable;
use thermolimit_cli::RunError;

fn overrides(dir: &TempDir, sub: &str) -> Overrides {
    Overrides { out_dir: Some(dir.path().join(sub)), ..Overrides::default() }
}

const SMALL_T1: &str = r#"{"experiment": "theorem1-scaling",
    "parameters": {"theorem1": {"n_values": [1, 100], "oracle_sizes": [2], "random_ensembles": 1,
                                "oracle_times": {"start": 0, "end": 1, "count": 3}}}}"#;

#[test]
fn writes_csv_and_sidecar_per_stage() {
    let dir = TempDir::new().unwrap();
    let outcome = run(SMALL_T1, &overrides(&dir, "out")).unwrap();
    assert_eq!(outcome.failures, 0);
    let mut names: Vec<String> =
        outcome.files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(
        names,
        [
            "theorem1-scaling-oracle.csv",
            "theorem1-scaling-oracle.meta.json",
            "theorem1-scaling-scaling.csv",
            "theorem1-scaling-scaling.meta.json"
        ]
    );
    let meta: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("out/theorem1-scaling-scaling.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"], SMALL_T1);
    assert_eq!(meta["stage"], "scaling");
    // No temporary files are left behind.
    assert_eq!(fs::read_dir(dir.path().join("out")).unwrap().count(), 4);
}

#[test]
fn json_output_round_trips_config() {
    let dir = TempDir::new().unwrap();
    let o = Overrides { format: Some(Format::Json), seed: Some(9), ..overrides(&dir, "json") };
    let outcome = run(SMALL_T1, &o).unwrap();
    assert_eq!(outcome.files.len(), 2);
    for (file, table) in outcome.files.iter().zip(&outcome.tables) {
        let (back, meta) = ResultTable::from_json(&fs::read(file).unwrap()).unwrap();
        assert!(back.same(table));
        assert_eq!(meta.config, SMALL_T1);
        assert_eq!(meta.seed, 9);
    }
}

#[test]
fn invalid_configs_write_nothing() {
    let dir = TempDir::new().unwrap();
    let cases = [
        "not json",
        r#"{"experiment": "theorem9"}"#,
        r#"{"experiment": "theorem1-scaling", "extra": 1}"#,
        r#"{"experiment": "theorem1-scaling", "parameters": {"theorem1": {"n_values": [5]}}}"#,
        r#"{"experiment": "theorem1-scaling", "parameters": {"theorem1": {"h": {"re": [[1, 2], [3, 4]]}}}}"#,
        r#"{"experiment": "theorem2-decoherence", "parameters": {"theorem2": {"a_values": [1.0, 0.5]}}}"#,
        r#"{"experiment": "theorem2-decoherence", "parameters": {"theorem2": {"g_values": [-1.0]}}}"#,
        r#"{"experiment": "theorem2-decoherence",
            "parameters": {"theorem2": {"commuting": {"v0": {"pauli": "x"}}}}}"#,
        r#"{"experiment": "theorem3-cat", "parameters": {"theorem3": {"cutoff": 3}}}"#,
        r#"{"experiment": "theorem3-cat", "parameters": {"theorem3": {"omega": 0}}}"#,
    ];
    for (k, text) in cases.iter().enumerate() {
        let err = run(text, &overrides(&dir, &format!("case{k}"))).unwrap_err();
        assert_eq!(err.exit_code(), 2, "case {k}: {err}");
        assert!(!dir.path().join(format!("case{k}")).exists(), "case {k} wrote output");
    }
}

#[test]
fn oversized_problems_exit_three() {
    let dir = TempDir::new().unwrap();
    let cases = [
        r#"{"experiment": "theorem1-scaling", "parameters": {"theorem1": {"oracle_sizes": [13]}}}"#,
        r#"{"experiment": "theorem2-decoherence", "parameters": {"theorem2": {"n": 12}}}"#,
        r#"{"experiment": "theorem3-cat", "parameters": {"theorem3": {"cutoff": 600}}}"#,
    ];
    for (k, text) in cases.iter().enumerate() {
        let err = run(text, &overrides(&dir, &format!("big{k}"))).unwrap_err();
        assert!(matches!(err, RunError::TooLarge(_)), "case {k}: {err}");
        assert_eq!(err.exit_code(), 3);
        assert!(!dir.path().join(format!("big{k}")).exists());
    }
}

#[test]
fn failing_rows_are_counted() {
    // A coupling ladder that does not shrink the error fails the convergence stage.
    let text = r#"{"experiment": "theorem2-decoherence",
        "parameters": {"theorem2": {"g_values": [80.0, 5.0]}}}"#;
    let dir = TempDir::new().unwrap();
    let outcome = run(text, &overrides(&dir, "out")).unwrap();
    assert!(outcome.failures > 0);
    let csv = fs::read_to_string(dir.path().join("out/theorem2-decoherence-convergence.csv")).unwrap();
    assert!(csv.contains(",false"));
}

#[test]
fn wigner_stage_is_optional() {
    let text = r#"{"experiment": "theorem3-cat", "parameters": {"theorem3": {
        "n_values": [1], "times": {"start": 0, "end": 1, "count": 2},
        "wigner": {"n": 2, "t": 1.0, "x": {"min": -3, "max": 3, "count": 7}, "p": {"min": -3, "max": 3, "count": 5}}}}}"#;
    let dir = TempDir::new().unwrap();
    let outcome = run(text, &overrides(&dir, "out")).unwrap();
    let wigner = outcome.tables.iter().find(|t| t.stage == "wigner").unwrap();
    assert_eq!(wigner.rows().len(), 35);
}
