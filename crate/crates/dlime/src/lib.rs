//! Deterministic model-agnostic local explanations for tabular binary
//! classifiers, plus the stochastic perturbation baseline it is measured
//! against and a Jaccard-based stability harness.
//!
//! The deterministic pipeline clusters the training data bottom-up,
//! routes a test instance to its cluster by nearest neighbors, and fits
//! an interpretable linear surrogate over that cluster's rows with the
//! opaque model's probabilities as the target. Because no step samples,
//! explaining the same instance twice yields bit-identical output. The
//! baseline pipeline instead perturbs around the instance with seeded
//! Gaussian noise; its explanations drift across seeds, which the
//! stability harness quantifies as average pairwise Jaccard distance over
//! the selected feature sets.
//!
//! ```
//! use dlime::clustering::{agglomerate, cut_largest_gap};
//! use dlime::data::{standardize, Dataset};
//! use dlime::explainers::{dlime_explain, DlimeConfig};
//! use dlime::models::{train_random_forest, OpaqueModel, RandomForestConfig};
//!
//! // A toy two-blob dataset: class tracks the blob.
//! let raw: Vec<Vec<f64>> = (0..20)
//!     .map(|i| {
//!         let c = if i < 10 { -3.0 } else { 3.0 };
//!         vec![c + 0.1 * i as f64, c - 0.05 * i as f64]
//!     })
//!     .collect();
//! let (rows, standardization) = standardize(&raw);
//! let train = Dataset {
//!     name: "toy".into(),
//!     feature_names: vec!["a".into(), "b".into()],
//!     class_names: ["0".into(), "1".into()],
//!     labels: (0..20).map(|i| u8::from(i >= 10)).collect(),
//!     rows,
//!     standardization,
//! };
//!
//! let model = OpaqueModel::Forest(
//!     train_random_forest(&train, &RandomForestConfig { n_trees: 10, ..Default::default() })
//!         .unwrap(),
//! );
//! let clustering = cut_largest_gap(&agglomerate(&train.rows).unwrap(), 10).unwrap();
//! let x = train.rows[0].clone();
//! let cfg = DlimeConfig { k_features: 2, ..Default::default() };
//!
//! let first = dlime_explain(&train, &model, &x, &cfg, &clustering, "0").unwrap();
//! let again = dlime_explain(&train, &model, &x, &cfg, &clustering, "0").unwrap();
//! assert_eq!(first.to_json(), again.to_json()); // bit-stable
//! ```

pub mod clustering;
pub mod data;
pub mod datagen;
pub mod error;
pub mod explainers;
pub mod models;
pub mod neighbors;
pub mod report;
pub mod rng;
pub mod stability;
pub mod surrogate;

pub use error::{DlimeError, Result};

/// Long-form guide, published with mdbook from `book/`. The concept
/// chapters are included here verbatim so their examples compile and run
/// as doc-tests; the book cannot drift from the crate.
pub mod guide {
    #[doc = include_str!("../../../book/src/clustering.md")]
    pub mod clustering_and_routing {}
    #[doc = include_str!("../../../book/src/surrogate.md")]
    pub mod the_linear_surrogate {}
    #[doc = include_str!("../../../book/src/stability.md")]
    pub mod measuring_stability {}
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    pub mod reproducibility {}
}
