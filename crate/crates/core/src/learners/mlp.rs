//! Fully connected softmax networks trained with Adam.
//!
//! Inputs are standardized with statistics from the training rows. The loss
//! is mean softmax cross-entropy plus `0.5 * l2 * |W|^2 / batch_len` over the
//! weight matrices (biases are not penalized).

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::scaler::Standardizer;
use crate::rng::{derive_seed, seeded};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => libm::tanh(z),
        }
    }

    /// Derivative expressed through the activation output.
    fn derivative_from_output(self, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub hidden_layers: Vec<usize>,
    #[serde(default)]
    pub activation: Activation,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    #[serde(default = "default_l2")]
    pub l2: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_l2() -> f64 {
    1e-4
}

impl Default for MlpParams {
    /// One hidden layer of 100 ReLU units, Adam at a constant 0.001, 200
    /// epochs of 200-row batches.
    fn default() -> Self {
        Self {
            hidden_layers: vec![100],
            activation: Activation::Relu,
            learning_rate: 1e-3,
            epochs: 200,
            batch_size: 200,
            l2: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct Layer {
    n_in: usize,
    n_out: usize,
    weights: usize,
    bias: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    layers: Vec<Layer>,
    params: Vec<f64>,
    activation: Activation,
    l2: f64,
    scaler: Standardizer,
}

impl Mlp {
    /// Untrained network with Glorot-uniform weights and biases; the input
    /// scaler is the identity.
    pub fn initialize(
        n_inputs: usize,
        n_classes: usize,
        hidden_layers: &[usize],
        activation: Activation,
        l2: f64,
        seed: u64,
    ) -> Self {
        let mut sizes = vec![n_inputs];
        sizes.extend_from_slice(hidden_layers);
        sizes.push(n_classes);
        let mut layers = Vec::new();
        let mut offset = 0;
        for w in sizes.windows(2) {
            let (n_in, n_out) = (w[0], w[1]);
            layers.push(Layer {
                n_in,
                n_out,
                weights: offset,
                bias: offset + n_in * n_out,
            });
            offset += n_in * n_out + n_out;
        }
        let mut rng = seeded(seed);
        let mut params = vec![0.0; offset];
        for l in &layers {
            let limit = libm::sqrt(6.0 / (l.n_in + l.n_out) as f64);
            for p in &mut params[l.weights..l.bias + l.n_out] {
                *p = rng.random_range(-limit..limit);
            }
        }
        Self {
            layers,
            params,
            activation,
            l2,
            scaler: Standardizer::identity(n_inputs),
        }
    }

    /// Same layout with every parameter zero.
    pub fn zeroed(mut self) -> Self {
        self.params.iter_mut().for_each(|p| *p = 0.0);
        self
    }

    pub fn fit(params: &MlpParams, x: &[f64], n_cols: usize, y: &[u32], n_classes: usize) -> Self {
        let mut net = Self::initialize(
            n_cols,
            n_classes,
            &params.hidden_layers,
            params.activation,
            params.l2,
            derive_seed(params.seed, 0),
        );
        net.train(params, x, n_cols, y);
        net
    }

    /// Fits the scaler and runs minibatch Adam starting from the current
    /// parameters.
    pub(crate) fn train(&mut self, params: &MlpParams, x: &[f64], n_cols: usize, y: &[u32]) {
        self.scaler = Standardizer::fit(x, n_cols);
        let scaled = self.scaler.transform(x);
        let n = y.len();
        let batch = params.batch_size.clamp(1, n.max(1));
        let mut adam = Adam::new(self.params.len(), params.learning_rate);
        let mut rng = seeded(derive_seed(params.seed, 1));
        let mut order: Vec<usize> = (0..n).collect();
        let mut bx = Vec::with_capacity(batch * n_cols);
        let mut by = Vec::with_capacity(batch);
        for _ in 0..params.epochs {
            order.shuffle(&mut rng);
            for chunk in order.chunks(batch) {
                bx.clear();
                by.clear();
                for &i in chunk {
                    bx.extend_from_slice(&scaled[i * n_cols..(i + 1) * n_cols]);
                    by.push(y[i]);
                }
                let (_, grad) = self.loss_and_gradient(&bx, &by);
                adam.step(&mut self.params, &grad);
            }
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.layers[0].n_in
    }

    pub fn n_classes(&self) -> usize {
        self.layers.last().map_or(0, |l| l.n_out)
    }

    pub fn parameters(&self) -> &[f64] {
        &self.params
    }

    pub fn set_parameters(&mut self, params: &[f64]) {
        self.params.copy_from_slice(params);
    }

    /// Activations of every layer for one (already scaled) input; the last
    /// entry holds the logits.
    fn forward(&self, input: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![input.to_vec()];
        let last = self.layers.len() - 1;
        for (li, l) in self.layers.iter().enumerate() {
            let prev = &acts[li];
            let mut out = Vec::with_capacity(l.n_out);
            for o in 0..l.n_out {
                let w = &self.params[l.weights + o * l.n_in..l.weights + (o + 1) * l.n_in];
                let mut z = self.params[l.bias + o];
                for (wi, xi) in w.iter().zip(prev) {
                    z += wi * xi;
                }
                out.push(if li == last { z } else { self.activation.apply(z) });
            }
            acts.push(out);
        }
        acts
    }

    /// Loss and its gradient with respect to [`Mlp::parameters`] on a batch
    /// of network inputs (no scaling applied).
    pub fn loss_and_gradient(&self, x: &[f64], y: &[u32]) -> (f64, Vec<f64>) {
        let n_in = self.n_inputs();
        let n = y.len() as f64;
        let mut grad = vec![0.0; self.params.len()];
        let mut loss = 0.0;
        for (row, &label) in x.chunks_exact(n_in).zip(y) {
            let acts = self.forward(row);
            let logits = acts.last().unwrap();
            let probs = softmax(logits);
            loss -= libm::log(probs[label as usize].max(f64::MIN_POSITIVE));
            // dL/dz at the output layer.
            let mut delta: Vec<f64> = probs;
            delta[label as usize] -= 1.0;
            for li in (0..self.layers.len()).rev() {
                let l = self.layers[li];
                let input = &acts[li];
                for o in 0..l.n_out {
                    let d = delta[o];
                    grad[l.bias + o] += d;
                    let gw = &mut grad[l.weights + o * l.n_in..l.weights + (o + 1) * l.n_in];
                    for (g, xi) in gw.iter_mut().zip(input) {
                        *g += d * xi;
                    }
                }
                if li > 0 {
                    let mut next = vec![0.0; l.n_in];
                    for (o, d) in delta.iter().enumerate() {
                        let w = &self.params[l.weights + o * l.n_in..l.weights + (o + 1) * l.n_in];
                        for (nx, wi) in next.iter_mut().zip(w) {
                            *nx += d * wi;
                        }
                    }
                    for (nx, a) in next.iter_mut().zip(input) {
                        *nx *= self.activation.derivative_from_output(*a);
                    }
                    delta = next;
                }
            }
        }
        loss /= n;
        grad.iter_mut().for_each(|g| *g /= n);
        if self.l2 > 0.0 {
            for l in &self.layers {
                let weights = &self.params[l.weights..l.bias];
                for (g, &w) in grad[l.weights..l.bias].iter_mut().zip(weights) {
                    loss += 0.5 * self.l2 * w * w / n;
                    *g += self.l2 * w / n;
                }
            }
        }
        (loss, grad)
    }

    /// Logits for one raw (unscaled) input row.
    pub fn logits_row(&self, row: &[f64]) -> Vec<f64> {
        let mut scaled = Vec::with_capacity(row.len());
        self.scaler.transform_row(row, &mut scaled);
        self.forward(&scaled).pop().unwrap()
    }
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| libm::exp(z - max)).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_is_shift_invariant() {
        let a = softmax(&[1.0, 2.0, 3.0]);
        let b = softmax(&[1001.0, 1002.0, 1003.0]);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn learns_a_linear_boundary() {
        let mut x = Vec::new();
        let mut y = Vec::new();
        for i in 0..40 {
            let v = i as f64 / 40.0;
            x.extend_from_slice(&[v, 1.0 - v]);
            y.push(u32::from(v > 0.5));
        }
        let params = MlpParams {
            hidden_layers: vec![8],
            epochs: 300,
            batch_size: 10,
            learning_rate: 0.01,
            ..MlpParams::default()
        };
        let net = Mlp::fit(&params, &x, 2, &y, 2);
        let correct = x
            .chunks(2)
            .zip(&y)
            .filter(|(row, &label)| {
                let l = net.logits_row(row);
                u32::from(l[1] > l[0]) == label
            })
            .count();
        assert!(correct >= 38, "{correct}");
    }
}
