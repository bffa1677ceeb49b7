//! Dataset loading, cleaning, standardization, and deterministic splits.
//!
//! Rows are stored z-scored (population stddev, constant columns pinned to
//! zero with a recorded stddev of 1) so Euclidean distances in the
//! clustering and neighbor modules are meaningful across features with
//! different raw scales.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DlimeError, Result};
use crate::rng::CounterRng;

pub const SPEC_VERSION: &str = "1";

/// Per-feature standardization parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: f64,
    pub std: f64,
}

/// A cleaned, standardized tabular binary-classification dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub feature_names: Vec<String>,
    pub class_names: [String; 2],
    /// Standardized feature rows, n x m.
    pub rows: Vec<Vec<f64>>,
    /// 0/1 labels, one per row.
    pub labels: Vec<u8>,
    pub standardization: Vec<FeatureStats>,
}

/// Column roles for CSV ingestion.
#[derive(Debug, Clone)]
pub struct CsvSchema {
    /// Header name of the label column.
    pub label_col: String,
    /// Header names excluded from the feature matrix.
    pub id_cols: Vec<String>,
    /// Cell values treated as missing; a row containing any is dropped.
    pub missing_tokens: Vec<String>,
}

impl Default for CsvSchema {
    fn default() -> Self {
        CsvSchema {
            label_col: "class".to_string(),
            id_cols: Vec::new(),
            missing_tokens: vec!["?".to_string(), String::new(), "NA".to_string()],
        }
    }
}

/// Train/test split parameters.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl Dataset {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Map a standardized row back to raw feature units.
    pub fn destandardize_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.standardization)
            .map(|(x, s)| x * s.std + s.mean)
            .collect()
    }

    /// Canonical JSON serialization with stable field order.
    pub fn to_canonical_json(&self) -> String {
        serde_json::json!({
            "spec_version": SPEC_VERSION,
            "name": self.name,
            "feature_names": self.feature_names,
            "class_names": self.class_names,
            "rows": self.rows,
            "labels": self.labels,
            "standardization": self.standardization,
        })
        .to_string()
    }
}

/// Load a header-first RFC-4180 CSV, drop rows with missing values, map the
/// two raw label values to {0, 1} by ascending raw value, and standardize.
pub fn load_csv(path: &Path, schema: &CsvSchema) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(|e| DlimeError::Data(format!("cannot open {}: {e}", path.display())))?;

    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| DlimeError::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let label_idx = headers
        .iter()
        .position(|h| h == &schema.label_col)
        .ok_or_else(|| {
            DlimeError::Schema(format!(
                "label column '{}' not found in header [{}]",
                schema.label_col,
                headers.join(", ")
            ))
        })?;
    let id_idx: Vec<usize> = schema
        .id_cols
        .iter()
        .map(|c| {
            headers
                .iter()
                .position(|h| h == c)
                .ok_or_else(|| DlimeError::Schema(format!("id column '{c}' not found")))
        })
        .collect::<Result<_>>()?;

    let feature_cols: Vec<usize> = (0..headers.len())
        .filter(|i| *i != label_idx && !id_idx.contains(i))
        .collect();
    if feature_cols.is_empty() {
        return Err(DlimeError::Schema("no feature columns remain".into()));
    }
    let feature_names: Vec<String> = feature_cols.iter().map(|&i| headers[i].clone()).collect();
    {
        let uniq: BTreeSet<&String> = feature_names.iter().collect();
        if uniq.len() != feature_names.len() {
            return Err(DlimeError::Schema("duplicate feature column names".into()));
        }
    }

    let is_missing = |cell: &str| schema.missing_tokens.iter().any(|t| t == cell.trim());

    let mut raw_rows: Vec<Vec<f64>> = Vec::new();
    let mut raw_labels: Vec<String> = Vec::new();
    for (rec_index, record) in reader.records().enumerate() {
        let line = rec_index as u64 + 2; // header is line 1
        let record = record.map_err(|e| DlimeError::Parse {
            line,
            message: e.to_string(),
        })?;
        if record.len() != headers.len() {
            return Err(DlimeError::Parse {
                line,
                message: format!("expected {} fields, found {}", headers.len(), record.len()),
            });
        }
        let relevant = feature_cols.iter().chain(std::iter::once(&label_idx));
        if relevant.clone().any(|&i| is_missing(&record[i])) {
            continue;
        }
        let row: Vec<f64> = feature_cols
            .iter()
            .map(|&i| {
                record[i].trim().parse::<f64>().map_err(|_| DlimeError::Parse {
                    line,
                    message: format!(
                        "column '{}': cannot parse '{}' as a number",
                        headers[i], &record[i]
                    ),
                })
            })
            .collect::<Result<_>>()?;
        raw_rows.push(row);
        raw_labels.push(record[label_idx].trim().to_string());
    }

    if raw_rows.is_empty() {
        return Err(DlimeError::Data(format!(
            "no rows remain after dropping missing values from {}",
            path.display()
        )));
    }
    if raw_rows.len() < 2 {
        return Err(DlimeError::Data("need at least 2 complete rows".into()));
    }

    let mut classes: Vec<String> = raw_labels.clone();
    classes.sort_by(|a, b| compare_raw_labels(a, b));
    classes.dedup();
    if classes.len() != 2 {
        return Err(DlimeError::Schema(format!(
            "label column '{}' has {} distinct values after cleaning; need exactly 2",
            schema.label_col,
            classes.len()
        )));
    }
    let labels: Vec<u8> = raw_labels
        .iter()
        .map(|l| u8::from(l == &classes[1]))
        .collect();

    let (rows, standardization) = standardize(&raw_rows);
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());

    Ok(Dataset {
        name,
        feature_names,
        class_names: [classes[0].clone(), classes[1].clone()],
        rows,
        labels,
        standardization,
    })
}

/// Ascending raw value: numeric when both sides parse, lexicographic otherwise.
fn compare_raw_labels(a: &str, b: &str) -> std::cmp::Ordering {
    match (a.parse::<f64>(), b.parse::<f64>()) {
        (Ok(x), Ok(y)) => x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Equal),
        _ => a.cmp(b),
    }
}

/// Z-score each column with the population stddev. Constant columns map to
/// all zeros and record a stddev of 1 so de-standardization round-trips.
pub fn standardize(raw_rows: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<FeatureStats>) {
    let n = raw_rows.len();
    assert!(n >= 2, "standardize needs at least 2 rows");
    let m = raw_rows[0].len();

    let mut stats = Vec::with_capacity(m);
    for j in 0..m {
        let mean = raw_rows.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let var = raw_rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        stats.push(FeatureStats {
            mean,
            std: if std > 0.0 { std } else { 1.0 },
        });
    }
    let rows = raw_rows
        .iter()
        .map(|r| {
            r.iter()
                .zip(&stats)
                .map(|(x, s)| (x - s.mean) / s.std)
                .collect()
        })
        .collect();
    (rows, stats)
}

/// Deterministic shuffle-then-cut split. The first ceil(n * train_fraction)
/// shuffled indices go to train.
pub fn train_test_split(d: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let n = d.n_rows();
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(DlimeError::Usage(format!(
            "train_fraction must be in (0,1), got {}",
            spec.train_fraction
        )));
    }
    let n_train = ((n as f64) * spec.train_fraction).ceil() as usize;
    if n_train == 0 || n_train >= n {
        return Err(DlimeError::Data(format!(
            "split leaves an empty partition (n={n}, train_fraction={})",
            spec.train_fraction
        )));
    }

    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = CounterRng::new(spec.seed);
    rng.shuffle(&mut indices);

    let subset = |idx: &[usize], suffix: &str| Dataset {
        name: format!("{}__{suffix}", d.name),
        feature_names: d.feature_names.clone(),
        class_names: d.class_names.clone(),
        rows: idx.iter().map(|&i| d.rows[i].clone()).collect(),
        labels: idx.iter().map(|&i| d.labels[i]).collect(),
        standardization: d.standardization.clone(),
    };
    Ok((
        subset(&indices[..n_train], "train"),
        subset(&indices[n_train..], "test"),
    ))
}

/// The shuffled index order a split would use, exposed so callers can pick
/// test instances reproducibly.
pub fn split_indices(n: usize, spec: &SplitSpec) -> (Vec<usize>, Vec<usize>) {
    let n_train = ((n as f64) * spec.train_fraction).ceil() as usize;
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = CounterRng::new(spec.seed);
    rng.shuffle(&mut indices);
    let test = indices.split_off(n_train.min(n));
    (indices, test)
}
