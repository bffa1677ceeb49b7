//! Opaque classifiers behind a single class-probability contract.
//!
//! Built-in kinds (random forest, MLP) are deterministic given (data,
//! config, seed) and serialize to JSON. The external kind adapts any child
//! process speaking the line protocol in [`external`].

pub mod external;
pub mod forest;
pub mod mlp;

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{DlimeError, Result};

pub use external::ExternalModel;
pub use forest::{train_random_forest, RandomForest, RandomForestConfig};
pub use mlp::{train_mlp, Mlp, MlpConfig};

/// A trained classifier exposing P(class = 1) over feature rows.
pub enum OpaqueModel {
    Forest(RandomForest),
    Mlp(Mlp),
    External(ExternalModel),
}

impl OpaqueModel {
    pub fn kind(&self) -> &'static str {
        match self {
            OpaqueModel::Forest(_) => "rf",
            OpaqueModel::Mlp(_) => "mlp",
            OpaqueModel::External(_) => "external",
        }
    }

    /// Feature count the model was trained with, when known.
    pub fn n_features(&self) -> Option<usize> {
        match self {
            OpaqueModel::Forest(f) => Some(f.n_features),
            OpaqueModel::Mlp(m) => Some(m.n_features()),
            OpaqueModel::External(e) => Some(e.n_features()),
        }
    }

    /// Probability of class 1 for each row.
    pub fn predict_proba(&self, rows: &[Vec<f64>]) -> Result<Vec<f64>> {
        if let Some(m) = self.n_features() {
            if let Some(bad) = rows.iter().find(|r| r.len() != m) {
                return Err(DlimeError::Model(format!(
                    "row has {} features, model expects {m}",
                    bad.len()
                )));
            }
        }
        match self {
            OpaqueModel::Forest(f) => Ok(f.predict_proba(rows)),
            OpaqueModel::Mlp(net) => Ok(net.predict_proba(rows)),
            OpaqueModel::External(e) => e.predict_proba(rows),
        }
    }

    /// 0/1 predictions at the 0.5 threshold.
    pub fn predict(&self, rows: &[Vec<f64>]) -> Result<Vec<u8>> {
        Ok(self
            .predict_proba(rows)?
            .iter()
            .map(|&p| u8::from(p >= 0.5))
            .collect())
    }

    /// Fraction of rows classified correctly.
    pub fn accuracy(&self, d: &Dataset) -> Result<f64> {
        let preds = self.predict(&d.rows)?;
        let correct = preds.iter().zip(&d.labels).filter(|(p, l)| p == l).count();
        Ok(correct as f64 / d.n_rows() as f64)
    }
}

/// Serialized form of a built-in model, embedding the dataset context a
/// later `explain` invocation needs.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelFile {
    pub spec_version: String,
    pub kind: String,
    pub dataset: String,
    pub feature_names: Vec<String>,
    pub class_names: [String; 2],
    pub standardization: Vec<crate::data::FeatureStats>,
    pub metrics: ModelMetrics,
    pub model: serde_json::Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelMetrics {
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub majority_class_baseline: f64,
}

impl ModelFile {
    pub fn from_model(model: &OpaqueModel, train: &Dataset, metrics: ModelMetrics) -> Result<Self> {
        let payload = match model {
            OpaqueModel::Forest(f) => serde_json::to_value(f)?,
            OpaqueModel::Mlp(m) => serde_json::to_value(m)?,
            OpaqueModel::External(_) => {
                return Err(DlimeError::Model(
                    "external models cannot be serialized".into(),
                ))
            }
        };
        Ok(ModelFile {
            spec_version: crate::data::SPEC_VERSION.to_string(),
            kind: model.kind().to_string(),
            dataset: train.name.trim_end_matches("__train").to_string(),
            feature_names: train.feature_names.clone(),
            class_names: train.class_names.clone(),
            standardization: train.standardization.clone(),
            metrics,
            model: payload,
        })
    }

    pub fn into_model(self) -> Result<OpaqueModel> {
        match self.kind.as_str() {
            "rf" => Ok(OpaqueModel::Forest(serde_json::from_value(self.model)?)),
            "mlp" => Ok(OpaqueModel::Mlp(serde_json::from_value(self.model)?)),
            other => Err(DlimeError::Model(format!(
                "cannot deserialize model kind '{other}'"
            ))),
        }
    }
}

/// Fraction of the most common label; the floor any useful model must beat.
pub fn majority_class_baseline(d: &Dataset) -> f64 {
    let ones = d.labels.iter().filter(|&&l| l == 1).count();
    let zeros = d.n_rows() - ones;
    ones.max(zeros) as f64 / d.n_rows() as f64
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::data::{standardize, Dataset};
    use crate::rng::CounterRng;

    /// Two linearly separable 2-D blobs, 10 points each.
    pub fn separable_dataset(seed: u64) -> Dataset {
        let mut rng = CounterRng::new(seed);
        let mut raw = Vec::new();
        let mut labels = Vec::new();
        for label in 0..2u8 {
            let center = if label == 0 { -3.0 } else { 3.0 };
            for _ in 0..10 {
                raw.push(vec![
                    center + rng.next_normal() * 0.3,
                    center + rng.next_normal() * 0.3,
                ]);
                labels.push(label);
            }
        }
        let (rows, standardization) = standardize(&raw);
        Dataset {
            name: "separable".into(),
            feature_names: vec!["x0".into(), "x1".into()],
            class_names: ["0".into(), "1".into()],
            rows,
            labels,
            standardization,
        }
    }
}
