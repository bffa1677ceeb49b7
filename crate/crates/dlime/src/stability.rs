//! Stability measurement: Jaccard distance over the feature-name sets
//! selected across repeated explanations of the same instance.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::explainers::Explanation;

/// |S1 ∩ S2| / |S1 ∪ S2|. Two empty sets count as identical (1); the
/// harness can never produce that with K >= 1, but the function is total.
pub fn jaccard_coefficient<T: Ord>(s1: &BTreeSet<T>, s2: &BTreeSet<T>) -> f64 {
    let union = s1.union(s2).count();
    if union == 0 {
        return 1.0;
    }
    let intersection = s1.intersection(s2).count();
    intersection as f64 / union as f64
}

pub fn jaccard_distance<T: Ord>(s1: &BTreeSet<T>, s2: &BTreeSet<T>) -> f64 {
    1.0 - jaccard_coefficient(s1, s2)
}

/// Pairwise Jaccard distances across repeated explanations of one instance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    pub method: String,
    pub dataset: String,
    pub model: String,
    pub iterations: usize,
    pub feature_sets: Vec<Vec<String>>,
    /// Row-major iterations x iterations matrix.
    pub distance_matrix: Vec<Vec<f64>>,
    /// Mean over off-diagonal entries only.
    pub average_distance: f64,
    /// Largest |weight difference| for any feature shared between two
    /// iterations; informational, not part of the Jaccard measure.
    pub max_weight_delta: f64,
}

impl StabilityReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "spec_version": crate::data::SPEC_VERSION,
            "method": self.method,
            "dataset": self.dataset,
            "model": self.model,
            "iterations": self.iterations,
            "feature_sets": self.feature_sets,
            "distance_matrix": self.distance_matrix,
            "average_distance": self.average_distance,
            "max_weight_delta": self.max_weight_delta,
        })
    }
}

/// Run `explain_fn` once per iteration (the closure decides how iteration
/// index maps to a seed, if any) and assemble the report.
pub fn run_stability<F>(
    explain_fn: F,
    method: &str,
    dataset: &str,
    model: &str,
    iterations: usize,
) -> Result<StabilityReport>
where
    F: Fn(usize) -> Result<Explanation>,
{
    assert!(iterations >= 2, "stability needs at least 2 iterations");
    let explanations: Vec<Explanation> = (0..iterations)
        .map(|i| {
            explain_fn(i).map_err(|e| {
                crate::error::DlimeError::Internal(format!("iteration {i} failed: {e}"))
            })
        })
        .collect::<Result<_>>()?;

    let sets: Vec<BTreeSet<String>> = explanations.iter().map(|e| e.feature_set()).collect();
    let mut matrix = vec![vec![0.0; iterations]; iterations];
    let mut total = 0.0;
    for i in 0..iterations {
        for j in (i + 1)..iterations {
            let d = jaccard_distance(&sets[i], &sets[j]);
            matrix[i][j] = d;
            matrix[j][i] = d;
            total += 2.0 * d;
        }
    }
    let average = total / (iterations * (iterations - 1)) as f64;

    let mut max_weight_delta = 0.0f64;
    for i in 0..iterations {
        for j in (i + 1)..iterations {
            for ei in &explanations[i].entries {
                for ej in &explanations[j].entries {
                    if ei.feature == ej.feature {
                        max_weight_delta = max_weight_delta.max((ei.weight - ej.weight).abs());
                    }
                }
            }
        }
    }

    Ok(StabilityReport {
        method: method.to_string(),
        dataset: dataset.to_string(),
        model: model.to_string(),
        iterations,
        feature_sets: sets
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect(),
        distance_matrix: matrix,
        average_distance: average,
        max_weight_delta,
    })
}
