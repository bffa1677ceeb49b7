//! The two end-to-end explanation pipelines.
//!
//! The deterministic pipeline routes the instance to a training cluster via
//! nearest neighbors and fits the surrogate over that cluster's rows with
//! the opaque model's probabilities as the regression target. It takes no
//! seed anywhere. The perturbation baseline draws standard-normal samples
//! in standardized feature space, weights them by an exponential distance
//! kernel, and is only reproducible for a fixed seed.

use serde::{Deserialize, Serialize};

use crate::clustering::{euclidean, FlatClustering};
use crate::data::Dataset;
use crate::error::{DlimeError, Result};
use crate::models::OpaqueModel;
use crate::neighbors::NeighborIndex;
use crate::rng::CounterRng;
use crate::surrogate::{self, SelectionMode};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExplanationEntry {
    pub feature: String,
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Dlime { cluster_id: usize, cluster_size: usize },
    Lime { n_samples: usize, seed: u64 },
}

/// An ordered list of (feature, signed weight) pairs plus surrogate
/// metadata; what the bar chart and the stability harness consume.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Explanation {
    pub method: String,
    pub instance_id: String,
    pub k: usize,
    pub entries: Vec<ExplanationEntry>,
    pub r2: f64,
    pub selection_mode: SelectionMode,
    pub provenance: Provenance,
}

impl Explanation {
    pub fn feature_set(&self) -> std::collections::BTreeSet<String> {
        self.entries.iter().map(|e| e.feature.clone()).collect()
    }

    /// Stable-field-order JSON for golden-file tests.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "spec_version": crate::data::SPEC_VERSION,
            "method": self.method,
            "instance_id": self.instance_id,
            "K": self.k,
            "entries": self.entries.iter()
                .map(|e| serde_json::json!({"feature": e.feature, "weight": e.weight}))
                .collect::<Vec<_>>(),
            "r2": self.r2,
            "selection_mode": match self.selection_mode {
                SelectionMode::Forward => "forward",
                SelectionMode::HighestWeights => "highest_weights",
            },
            "provenance": serde_json::to_value(&self.provenance).unwrap(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct DlimeConfig {
    pub k_neighbors: usize,
    pub k_features: usize,
    pub max_clusters: usize,
    pub use_distance_weights: bool,
}

impl Default for DlimeConfig {
    fn default() -> Self {
        DlimeConfig {
            k_neighbors: 1,
            k_features: 5,
            max_clusters: 10,
            use_distance_weights: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LimeConfig {
    pub n_samples: usize,
    pub k_features: usize,
    /// Defaults to 0.75 * sqrt(m) when unset.
    pub kernel_width: Option<f64>,
    pub seed: u64,
}

impl Default for LimeConfig {
    fn default() -> Self {
        LimeConfig {
            n_samples: 5000,
            k_features: 5,
            kernel_width: None,
            seed: 0,
        }
    }
}

pub fn default_kernel_width(m: usize) -> f64 {
    0.75 * (m as f64).sqrt()
}

fn kernel_weight(dist: f64, width: f64) -> f64 {
    (-(dist * dist) / (width * width)).exp()
}

/// Deterministic explanation: cluster routing + surrogate over the cluster.
pub fn dlime_explain(
    train: &Dataset,
    model: &OpaqueModel,
    x: &[f64],
    cfg: &DlimeConfig,
    clustering: &FlatClustering,
    instance_id: &str,
) -> Result<Explanation> {
    if x.len() != train.n_features() {
        return Err(DlimeError::Data(format!(
            "instance has {} features, dataset has {}",
            x.len(),
            train.n_features()
        )));
    }
    let index = NeighborIndex::new(&train.rows, clustering)?;
    let cluster_id = index.route_cluster(x, cfg.k_neighbors)?;
    let members = clustering.members(cluster_id);
    if members.len() < 2 {
        return Err(DlimeError::InsufficientCluster {
            cluster_id,
            size: members.len(),
        });
    }

    let sample_rows: Vec<Vec<f64>> = members.iter().map(|&i| train.rows[i].clone()).collect();
    let responses = model.predict_proba(&sample_rows)?;
    let weights: Vec<f64> = if cfg.use_distance_weights {
        let width = default_kernel_width(train.n_features());
        sample_rows
            .iter()
            .map(|r| kernel_weight(euclidean(r, x), width))
            .collect()
    } else {
        vec![1.0; sample_rows.len()]
    };

    let sel = surrogate::select_features(&sample_rows, &responses, &weights, cfg.k_features)?;
    let (entries, refit) =
        surrogate::explanation_entries(&sample_rows, &responses, &weights, &sel, &train.feature_names)?;

    Ok(Explanation {
        method: "dlime".into(),
        instance_id: instance_id.into(),
        k: sel.k,
        entries: entries
            .into_iter()
            .map(|(feature, weight)| ExplanationEntry { feature, weight })
            .collect(),
        r2: refit.r_squared,
        selection_mode: sel.mode,
        provenance: Provenance::Dlime {
            cluster_id,
            cluster_size: members.len(),
        },
    })
}

/// Perturbation baseline: standard-normal samples in standardized space,
/// kernel-weighted surrogate around the instance.
pub fn lime_explain(
    train: &Dataset,
    model: &OpaqueModel,
    x: &[f64],
    cfg: &LimeConfig,
    instance_id: &str,
) -> Result<Explanation> {
    let m = train.n_features();
    if x.len() != m {
        return Err(DlimeError::Data(format!(
            "instance has {} features, dataset has {m}",
            x.len()
        )));
    }
    if cfg.n_samples < 2 {
        return Err(DlimeError::Usage("n_samples must be at least 2".into()));
    }
    let width = cfg.kernel_width.unwrap_or_else(|| default_kernel_width(m));
    if width <= 0.0 {
        return Err(DlimeError::Usage("kernel width must be positive".into()));
    }

    let mut rng = CounterRng::new(cfg.seed);
    let samples: Vec<Vec<f64>> = (0..cfg.n_samples)
        .map(|_| (0..m).map(|_| rng.next_normal()).collect())
        .collect();
    let responses = model.predict_proba(&samples)?;
    let weights: Vec<f64> = samples
        .iter()
        .map(|z| kernel_weight(euclidean(z, x), width))
        .collect();

    let sel = surrogate::select_features(&samples, &responses, &weights, cfg.k_features)?;
    let (entries, refit) =
        surrogate::explanation_entries(&samples, &responses, &weights, &sel, &train.feature_names)?;

    Ok(Explanation {
        method: "lime".into(),
        instance_id: instance_id.into(),
        k: sel.k,
        entries: entries
            .into_iter()
            .map(|(feature, weight)| ExplanationEntry { feature, weight })
            .collect(),
        r2: refit.r_squared,
        selection_mode: sel.mode,
        provenance: Provenance::Lime {
            n_samples: cfg.n_samples,
            seed: cfg.seed,
        },
    })
}
