//! End-to-end tests of the `dlime` binary: exit codes, byte-identical
//! reruns, SVG bar counts, and validation of every emitted JSON artifact
//! against the versioned schemas in `schemas/`.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dlime"))
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

/// A small two-blob CSV: enough rows to split, cluster, and train quickly.
fn write_blob_csv(dir: &Path) -> PathBuf {
    let mut csv = String::from("f0,f1,f2,class\n");
    // Seedless but deterministic: low-discrepancy offsets around two centers.
    for i in 0..40 {
        let (center, class) = if i % 2 == 0 { (-3.0, 0) } else { (3.0, 1) };
        let a = center + 0.37 * ((i / 2) % 5) as f64;
        let b = center - 0.21 * ((i / 3) % 7) as f64;
        let c = 0.11 * (i % 11) as f64;
        csv.push_str(&format!("{a:.2},{b:.2},{c:.2},{class}\n"));
    }
    let path = dir.join("blobs.csv");
    std::fs::write(&path, csv).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn assert_exit(out: &Output, want: i32, context: &str) {
    assert_eq!(
        out.status.code(),
        Some(want),
        "{context}: stdout={} stderr={}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn exit_codes_match_error_classes() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_blob_csv(dir.path());
    let csv = csv.to_str().unwrap();
    let out_dir = dir.path().join("out");
    let out = out_dir.to_str().unwrap();

    // 0: success.
    let ok = run(&["train", "--data", csv, "--model", "rf", "--out", out]);
    assert_exit(&ok, 0, "successful train");

    // 2: usage/schema error (label column absent).
    let schema = run(&[
        "train", "--data", csv, "--model", "rf", "--label-col", "nonexistent", "--out", out,
    ]);
    assert_exit(&schema, 2, "missing label column");

    // 3: data error (instance index beyond the test split).
    let data = run(&[
        "explain", "--data", csv, "--model", "rf", "--method", "lime", "--instance", "9999",
        "--out", out,
    ]);
    assert_exit(&data, 3, "instance out of range");

    // 3: parse error with a line number (non-numeric feature cell).
    let bad_path = dir.path().join("bad.csv");
    std::fs::write(&bad_path, "f0,class\n1.0,0\nnot_a_number,1\n2.0,0\n").unwrap();
    let parse = run(&["train", "--data", bad_path.to_str().unwrap(), "--model", "rf", "--out", out]);
    assert_exit(&parse, 3, "malformed CSV cell");
    assert!(
        String::from_utf8_lossy(&parse.stderr).contains("line 3"),
        "parse error names the offending line"
    );

    // 4: model/transport error (external process dies before the handshake).
    let model = run(&[
        "explain", "--data", csv, "--model", "external", "--model-cmd", "/bin/false", "--method",
        "lime", "--out", out,
    ]);
    assert_exit(&model, 4, "external model fails handshake");

    // 5: I/O error (output path under a non-directory).
    let io = run(&["train", "--data", csv, "--model", "rf", "--out", "/dev/null/nested"]);
    assert_exit(&io, 5, "unwritable output path");
}

#[test]
fn fixed_seed_artifacts_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_blob_csv(dir.path());
    let csv = csv.to_str().unwrap();

    let mut artifacts: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    for run_idx in 0..2 {
        let out_dir = dir.path().join(format!("run{run_idx}"));
        let out = out_dir.to_str().unwrap();
        let train = run(&["train", "--data", csv, "--model", "mlp", "--seed", "3", "--out", out]);
        assert_exit(&train, 0, "train");
        let explain = run(&[
            "explain", "--data", csv, "--model", "mlp", "--method", "lime", "--seed", "3",
            "--out", out,
        ]);
        assert_exit(&explain, 0, "explain");
        artifacts.push((
            std::fs::read(out_dir.join("model.json")).unwrap(),
            std::fs::read(out_dir.join("explanation.json")).unwrap(),
        ));
    }
    assert_eq!(artifacts[0].0, artifacts[1].0, "model.json differs across reruns");
    assert_eq!(artifacts[0].1, artifacts[1].1, "explanation.json differs across reruns");
}

#[test]
fn k_features_controls_svg_bar_count() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_blob_csv(dir.path());
    let out_dir = dir.path().join("out");
    let explain = run(&[
        "explain", "--data", csv.to_str().unwrap(), "--model", "rf", "--method", "dlime",
        "--k-features", "2", "--out", out_dir.to_str().unwrap(),
    ]);
    assert_exit(&explain, 0, "dlime explain");
    let svg = std::fs::read_to_string(out_dir.join("explanation.svg")).unwrap();
    assert_eq!(svg.matches("class=\"bar\"").count(), 2, "one bar per selected feature");
}

#[test]
fn iteration_count_shapes_the_distance_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_blob_csv(dir.path());
    let out_dir = dir.path().join("out");
    let stability = run(&[
        "stability", "--data", csv.to_str().unwrap(), "--model", "rf", "--method", "dlime",
        "--iterations", "2", "--out", out_dir.to_str().unwrap(),
    ]);
    assert_exit(&stability, 0, "stability");
    let report: Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("stability.json")).unwrap()).unwrap();
    let matrix = report["distance_matrix"].as_array().unwrap();
    assert_eq!(matrix.len(), 2);
    assert_eq!(matrix[0].as_array().unwrap().len(), 2);
    // DLIME repeats are identical, so the matrix is all zeros.
    assert_eq!(report["average_distance"], 0.0);
}

// --- minimal JSON Schema validator (the subset our schemas use) ---------

fn type_matches(value: &Value, ty: &str) -> bool {
    match ty {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "number" => value.is_number(),
        "integer" => value.as_f64().is_some_and(|v| v.fract() == 0.0),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        other => panic!("unsupported type keyword {other}"),
    }
}

fn validate(value: &Value, schema: &Value, path: &str, errors: &mut Vec<String>) {
    if let Some(ty) = schema.get("type") {
        let allowed: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(list) => list.iter().map(|t| t.as_str().unwrap()).collect(),
            other => panic!("bad type clause {other}"),
        };
        if !allowed.iter().any(|t| type_matches(value, t)) {
            errors.push(format!("{path}: type is none of {allowed:?}"));
            return;
        }
        // A null that is explicitly allowed satisfies the whole clause.
        if value.is_null() {
            return;
        }
    }
    if let Some(allowed) = schema.get("enum").and_then(Value::as_array) {
        if !allowed.contains(value) {
            errors.push(format!("{path}: {value} not in enum {allowed:?}"));
        }
    }
    if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
        if value.as_f64().is_some_and(|v| v < min) {
            errors.push(format!("{path}: {value} below minimum {min}"));
        }
    }
    if let Some(max) = schema.get("maximum").and_then(Value::as_f64) {
        if value.as_f64().is_some_and(|v| v > max) {
            errors.push(format!("{path}: {value} above maximum {max}"));
        }
    }
    if let Some(obj) = value.as_object() {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for key in required {
                let key = key.as_str().unwrap();
                if !obj.contains_key(key) {
                    errors.push(format!("{path}: missing required key {key}"));
                }
            }
        }
        if let Some(props) = schema.get("properties").and_then(Value::as_object) {
            for (key, sub) in props {
                if let Some(v) = obj.get(key) {
                    validate(v, sub, &format!("{path}.{key}"), errors);
                }
            }
        }
    }
    if let Some(arr) = value.as_array() {
        if let Some(min) = schema.get("minItems").and_then(Value::as_u64) {
            if (arr.len() as u64) < min {
                errors.push(format!("{path}: {} items, minItems {min}", arr.len()));
            }
        }
        if let Some(max) = schema.get("maxItems").and_then(Value::as_u64) {
            if (arr.len() as u64) > max {
                errors.push(format!("{path}: {} items, maxItems {max}", arr.len()));
            }
        }
        if let Some(items) = schema.get("items") {
            for (i, v) in arr.iter().enumerate() {
                validate(v, items, &format!("{path}[{i}]"), errors);
            }
        }
    }
}

fn assert_valid(artifact: &Path, schema_name: &str) {
    let value: Value = serde_json::from_slice(&std::fs::read(artifact).unwrap()).unwrap();
    let schema: Value =
        serde_json::from_slice(&std::fs::read(schema_dir().join(schema_name)).unwrap()).unwrap();
    let mut errors = Vec::new();
    validate(&value, &schema, "$", &mut errors);
    assert!(
        errors.is_empty(),
        "{} does not validate against {schema_name}:\n{}",
        artifact.display(),
        errors.join("\n")
    );
}

#[test]
fn emitted_json_validates_against_shipped_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_blob_csv(dir.path());
    let csv = csv.to_str().unwrap();
    let out_dir = dir.path().join("out");
    let out = out_dir.to_str().unwrap();

    assert_exit(&run(&["train", "--data", csv, "--model", "rf", "--out", out]), 0, "train");
    assert_valid(&out_dir.join("model.json"), "model.schema.json");

    assert_exit(
        &run(&["explain", "--data", csv, "--model", "rf", "--method", "dlime", "--out", out]),
        0,
        "explain",
    );
    assert_valid(&out_dir.join("explanation.json"), "explanation.schema.json");
    assert_valid(&out_dir.join("dendrogram.json"), "dendrogram.schema.json");

    assert_exit(
        &run(&[
            "stability", "--data", csv, "--model", "rf", "--method", "lime", "--iterations", "3",
            "--out", out,
        ]),
        0,
        "stability",
    );
    assert_valid(&out_dir.join("stability.json"), "stability.schema.json");

    let data_dir = dir.path().join("data");
    assert_exit(
        &run(&[
            "benchmark", "--datasets", "hepatitis", "--data-dir", data_dir.to_str().unwrap(),
            "--out", out,
        ]),
        0,
        "benchmark",
    );
    assert_valid(&out_dir.join("benchmark.json"), "benchmark.schema.json");
}
