//! Random forest of CART trees: Gini impurity, midpoint thresholds,
//! bootstrap sampling, probability = fraction of trees voting class 1.
//!
//! Every random draw comes from a per-tree stream derived from
//! (seed, tree_index), so training is reproducible and could parallelize
//! across trees without changing output.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{DlimeError, Result};
use crate::rng::CounterRng;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RandomForestConfig {
    pub n_trees: usize,
    pub max_depth: usize,
    /// Candidate features per split; defaults to ceil(sqrt(m)).
    pub features_per_split: Option<usize>,
    pub seed: u64,
}

impl Default for RandomForestConfig {
    fn default() -> Self {
        RandomForestConfig {
            n_trees: 100,
            max_depth: 10,
            features_per_split: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf {
        /// Fraction of class-1 rows in this leaf's training subset.
        prob: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    fn predict(&self, row: &[f64]) -> f64 {
        match self {
            TreeNode::Leaf { prob } => *prob,
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if row[*feature] <= *threshold {
                    left.predict(row)
                } else {
                    right.predict(row)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RandomForest {
    pub n_features: usize,
    pub trees: Vec<TreeNode>,
    pub config: RandomForestConfig,
}

impl RandomForest {
    /// Fraction of trees whose leaf majority is class 1. A leaf at exactly
    /// 0.5 votes class 0 (the smaller label).
    pub fn predict_proba(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        rows.iter()
            .map(|row| {
                let votes = self
                    .trees
                    .iter()
                    .filter(|t| t.predict(row) > 0.5)
                    .count();
                votes as f64 / self.trees.len() as f64
            })
            .collect()
    }
}

fn gini(ones: usize, total: usize) -> f64 {
    if total == 0 {
        return 0.0;
    }
    let p = ones as f64 / total as f64;
    2.0 * p * (1.0 - p)
}

struct TreeBuilder<'a> {
    rows: &'a [Vec<f64>],
    labels: &'a [u8],
    max_depth: usize,
    features_per_split: usize,
    rng: CounterRng,
}

impl TreeBuilder<'_> {
    /// Sample `features_per_split` distinct feature indices, returned in
    /// ascending order so ties always resolve to the lowest index.
    fn candidate_features(&mut self, m: usize) -> Vec<usize> {
        if self.features_per_split >= m {
            return (0..m).collect();
        }
        let mut pool: Vec<usize> = (0..m).collect();
        self.rng.shuffle(&mut pool);
        let mut picked: Vec<usize> = pool[..self.features_per_split].to_vec();
        picked.sort_unstable();
        picked
    }

    fn build(&mut self, indices: &[usize], depth: usize) -> TreeNode {
        let total = indices.len();
        let ones = indices.iter().filter(|&&i| self.labels[i] == 1).count();
        let prob = ones as f64 / total as f64;
        if depth >= self.max_depth || ones == 0 || ones == total || total < 2 {
            return TreeNode::Leaf { prob };
        }

        let m = self.rows[0].len();
        let parent_impurity = gini(ones, total);
        let mut best: Option<(f64, usize, f64)> = None; // (gain, feature, threshold)
        for &feature in &self.candidate_features(m) {
            let mut values: Vec<f64> = indices.iter().map(|&i| self.rows[i][feature]).collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            values.dedup();
            for pair in values.windows(2) {
                let threshold = (pair[0] + pair[1]) / 2.0;
                let mut left_total = 0;
                let mut left_ones = 0;
                for &i in indices {
                    if self.rows[i][feature] <= threshold {
                        left_total += 1;
                        left_ones += usize::from(self.labels[i] == 1);
                    }
                }
                let right_total = total - left_total;
                let right_ones = ones - left_ones;
                let weighted = (left_total as f64 * gini(left_ones, left_total)
                    + right_total as f64 * gini(right_ones, right_total))
                    / total as f64;
                let gain = parent_impurity - weighted;
                // Strict > keeps the lowest (feature, threshold) on ties,
                // since candidates iterate in ascending order.
                if best.map(|(g, _, _)| gain > g).unwrap_or(gain > 1e-12) {
                    best = Some((gain, feature, threshold));
                }
            }
        }

        match best {
            None => TreeNode::Leaf { prob },
            Some((_, feature, threshold)) => {
                let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
                    .iter()
                    .partition(|&&i| self.rows[i][feature] <= threshold);
                TreeNode::Split {
                    feature,
                    threshold,
                    left: Box::new(self.build(&left_idx, depth + 1)),
                    right: Box::new(self.build(&right_idx, depth + 1)),
                }
            }
        }
    }
}

pub fn train_random_forest(train: &Dataset, cfg: &RandomForestConfig) -> Result<RandomForest> {
    let n = train.n_rows();
    let m = train.n_features();
    if n == 0 {
        return Err(DlimeError::Model("empty training set".into()));
    }
    if train.labels.iter().all(|&l| l == 0) || train.labels.iter().all(|&l| l == 1) {
        return Err(DlimeError::Model(
            "training set contains a single class".into(),
        ));
    }
    if cfg.n_trees == 0 || cfg.max_depth == 0 {
        return Err(DlimeError::Usage("n_trees and max_depth must be positive".into()));
    }
    let features_per_split = cfg
        .features_per_split
        .unwrap_or_else(|| (m as f64).sqrt().ceil() as usize)
        .min(m)
        .max(1);

    let base = CounterRng::new(cfg.seed);
    let trees = (0..cfg.n_trees)
        .map(|t| {
            let mut rng = base.stream(t as u64);
            let indices: Vec<usize> = (0..n).map(|_| rng.range_usize(n)).collect();
            let mut builder = TreeBuilder {
                rows: &train.rows,
                labels: &train.labels,
                max_depth: cfg.max_depth,
                features_per_split,
                rng,
            };
            builder.build(&indices, 0)
        })
        .collect();

    Ok(RandomForest {
        n_features: m,
        trees,
        config: RandomForestConfig {
            features_per_split: Some(features_per_split),
            ..*cfg
        },
    })
}
