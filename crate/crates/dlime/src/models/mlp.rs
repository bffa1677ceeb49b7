//! Feed-forward network with sigmoid activations throughout, trained by
//! full-batch gradient descent on binary cross-entropy.
//!
//! Defaults follow the two-hidden-layer shape with 5 and 2 units. Weight
//! init draws uniformly from [-0.5, 0.5] in a fixed order (per layer:
//! weights row-major, then biases) so a seed pins the whole trajectory.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{DlimeError, Result};
use crate::rng::CounterRng;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden_layers: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden_layers: vec![5, 2],
            learning_rate: 0.1,
            epochs: 2000,
            seed: 0,
        }
    }
}

/// Dense layer: `weights[out][in]`, one bias per output unit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Layer {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Layer>,
    pub config: MlpConfig,
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

impl Layer {
    fn zeros_like(&self) -> Layer {
        Layer {
            weights: self.weights.iter().map(|r| vec![0.0; r.len()]).collect(),
            biases: vec![0.0; self.biases.len()],
        }
    }

    fn forward(&self, input: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| sigmoid(b + w.iter().zip(input).map(|(wi, xi)| wi * xi).sum::<f64>()))
            .collect()
    }
}

impl Mlp {
    pub fn new(n_features: usize, config: MlpConfig) -> Result<Self> {
        if config.hidden_layers.is_empty() || config.hidden_layers.iter().any(|&h| h == 0) {
            return Err(DlimeError::Usage(
                "hidden_layers must be nonempty with positive sizes".into(),
            ));
        }
        if config.epochs == 0 || config.learning_rate <= 0.0 {
            return Err(DlimeError::Usage(
                "epochs and learning_rate must be positive".into(),
            ));
        }
        let mut sizes = vec![n_features];
        sizes.extend(&config.hidden_layers);
        sizes.push(1);

        let mut rng = CounterRng::new(config.seed);
        let layers = sizes
            .windows(2)
            .map(|io| {
                let (n_in, n_out) = (io[0], io[1]);
                let weights = (0..n_out)
                    .map(|_| (0..n_in).map(|_| rng.uniform(-0.5, 0.5)).collect())
                    .collect();
                let biases = (0..n_out).map(|_| rng.uniform(-0.5, 0.5)).collect();
                Layer { weights, biases }
            })
            .collect();
        Ok(Mlp { layers, config })
    }

    pub fn n_features(&self) -> usize {
        self.layers[0].weights[0].len()
    }

    /// Activations per layer, input included, for a single row.
    fn forward_trace(&self, row: &[f64]) -> Vec<Vec<f64>> {
        let mut activations = vec![row.to_vec()];
        for layer in &self.layers {
            let next = layer.forward(activations.last().unwrap());
            activations.push(next);
        }
        activations
    }

    pub fn predict_proba(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        rows.iter()
            .map(|row| *self.forward_trace(row).last().unwrap().first().unwrap())
            .collect()
    }

    /// Mean binary cross-entropy over the batch, clamped away from log(0).
    pub fn loss(&self, rows: &[Vec<f64>], labels: &[u8]) -> f64 {
        let eps = 1e-12;
        rows.iter()
            .zip(labels)
            .map(|(row, &y)| {
                let p = self.predict_proba(std::slice::from_ref(row))[0].clamp(eps, 1.0 - eps);
                if y == 1 {
                    -p.ln()
                } else {
                    -(1.0 - p).ln()
                }
            })
            .sum::<f64>()
            / rows.len() as f64
    }

    /// Analytic gradient of [`Mlp::loss`] w.r.t. every weight and bias,
    /// averaged over the batch. Sigmoid + cross-entropy makes the output
    /// delta simply (p - y).
    pub fn gradients(&self, rows: &[Vec<f64>], labels: &[u8]) -> Vec<Layer> {
        let mut grads: Vec<Layer> = self.layers.iter().map(Layer::zeros_like).collect();
        let scale = 1.0 / rows.len() as f64;

        for (row, &y) in rows.iter().zip(labels) {
            let activations = self.forward_trace(row);
            let output = activations.last().unwrap()[0];
            let mut delta = vec![output - f64::from(y)];

            for l in (0..self.layers.len()).rev() {
                let input = &activations[l];
                for (j, &dj) in delta.iter().enumerate() {
                    for (gw, &xi) in grads[l].weights[j].iter_mut().zip(input) {
                        *gw += scale * dj * xi;
                    }
                    grads[l].biases[j] += scale * dj;
                }
                if l > 0 {
                    // delta for the previous layer: (W^T delta) * a (1 - a)
                    delta = (0..input.len())
                        .map(|i| {
                            let back: f64 = self.layers[l]
                                .weights
                                .iter()
                                .zip(&delta)
                                .map(|(wj, dj)| wj[i] * dj)
                                .sum();
                            back * input[i] * (1.0 - input[i])
                        })
                        .collect();
                }
            }
        }
        grads
    }

    fn apply_gradients(&mut self, grads: &[Layer], lr: f64) {
        for (layer, grad) in self.layers.iter_mut().zip(grads) {
            for (wrow, grow) in layer.weights.iter_mut().zip(&grad.weights) {
                for (w, g) in wrow.iter_mut().zip(grow) {
                    *w -= lr * g;
                }
            }
            for (b, g) in layer.biases.iter_mut().zip(&grad.biases) {
                *b -= lr * g;
            }
        }
    }
}

pub fn train_mlp(train: &Dataset, cfg: &MlpConfig) -> Result<Mlp> {
    if train.n_rows() == 0 {
        return Err(DlimeError::Model("empty training set".into()));
    }
    if train.labels.iter().all(|&l| l == 0) || train.labels.iter().all(|&l| l == 1) {
        return Err(DlimeError::Model(
            "training set contains a single class".into(),
        ));
    }
    let mut net = Mlp::new(train.n_features(), cfg.clone())?;
    let lr = cfg.learning_rate;
    for _ in 0..cfg.epochs {
        let grads = net.gradients(&train.rows, &train.labels);
        net.apply_gradients(&grads, lr);
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::standardize;
    use crate::models::test_support::separable_dataset;
    use crate::models::OpaqueModel;

    #[test]
    fn zero_weights_predict_half() {
        let mut net = Mlp::new(3, MlpConfig::default()).unwrap();
        for layer in &mut net.layers {
            for row in &mut layer.weights {
                row.iter_mut().for_each(|w| *w = 0.0);
            }
            layer.biases.iter_mut().for_each(|b| *b = 0.0);
        }
        assert_eq!(net.predict_proba(&[vec![1.0, -2.0, 3.0]]), vec![0.5]);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let net = Mlp::new(3, MlpConfig {
            seed: 21,
            ..Default::default()
        })
        .unwrap();
        let mut rng = CounterRng::new(90);
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..3).map(|_| rng.uniform(-1.0, 1.0)).collect())
            .collect();
        let labels = vec![0, 1, 1, 0, 1];

        let analytic = net.gradients(&rows, &labels);
        let h = 1e-6;
        for l in 0..net.layers.len() {
            for j in 0..net.layers[l].weights.len() {
                for i in 0..net.layers[l].weights[j].len() {
                    let mut plus = net.clone();
                    plus.layers[l].weights[j][i] += h;
                    let mut minus = net.clone();
                    minus.layers[l].weights[j][i] -= h;
                    let numeric =
                        (plus.loss(&rows, &labels) - minus.loss(&rows, &labels)) / (2.0 * h);
                    let a = analytic[l].weights[j][i];
                    assert!(
                        (a - numeric).abs() <= 1e-5 * (1.0 + numeric.abs()),
                        "layer {l} w[{j}][{i}]: analytic {a} vs numeric {numeric}"
                    );
                }
                let mut plus = net.clone();
                plus.layers[l].biases[j] += h;
                let mut minus = net.clone();
                minus.layers[l].biases[j] -= h;
                let numeric = (plus.loss(&rows, &labels) - minus.loss(&rows, &labels)) / (2.0 * h);
                let a = analytic[l].biases[j];
                assert!((a - numeric).abs() <= 1e-5 * (1.0 + numeric.abs()));
            }
        }
    }

    #[test]
    fn xor_style_set_reaches_full_training_accuracy() {
        // Four XOR corners, replicated with slight jitter.
        let mut rng = CounterRng::new(30);
        let mut raw = Vec::new();
        let mut labels = Vec::new();
        for &(a, b) in &[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
            for _ in 0..5 {
                raw.push(vec![a + rng.uniform(-0.05, 0.05), b + rng.uniform(-0.05, 0.05)]);
                labels.push(u8::from((a as i32) ^ (b as i32) == 1));
            }
        }
        let (rows, standardization) = standardize(&raw);
        let d = Dataset {
            name: "xor".into(),
            feature_names: vec!["a".into(), "b".into()],
            class_names: ["0".into(), "1".into()],
            rows,
            labels,
            standardization,
        };
        let cfg = MlpConfig {
            hidden_layers: vec![5, 2],
            learning_rate: 0.9,
            epochs: 8000,
            seed: 3,
        };
        let model = OpaqueModel::Mlp(train_mlp(&d, &cfg).unwrap());
        assert_eq!(model.accuracy(&d).unwrap(), 1.0);
    }

    #[test]
    fn separable_set_trains_with_defaults() {
        let d = separable_dataset(40);
        let model = OpaqueModel::Mlp(train_mlp(&d, &MlpConfig::default()).unwrap());
        assert_eq!(model.accuracy(&d).unwrap(), 1.0);
    }

    #[test]
    fn training_is_deterministic() {
        let d = separable_dataset(41);
        let cfg = MlpConfig {
            epochs: 200,
            seed: 6,
            ..Default::default()
        };
        let a = serde_json::to_string(&train_mlp(&d, &cfg).unwrap()).unwrap();
        let b = serde_json::to_string(&train_mlp(&d, &cfg).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn probabilities_in_range_for_arbitrary_inputs() {
        let net = Mlp::new(4, MlpConfig {
            seed: 77,
            ..Default::default()
        })
        .unwrap();
        let mut rng = CounterRng::new(78);
        for _ in 0..10 {
            let row: Vec<f64> = (0..4).map(|_| rng.uniform(-100.0, 100.0)).collect();
            let p = net.predict_proba(&[row])[0];
            assert!((0.0..=1.0).contains(&p));
        }
    }

    use crate::rng::CounterRng;
}
