use serde::{Deserialize, Serialize};

use super::mlp::{Activation, Mlp, MlpParams};
use crate::rng::derive_seed;

/// Multinomial logistic regression: a softmax layer with no hidden units,
/// started from zero weights and trained with minibatch Adam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub learning_rate: f64,
    pub epochs: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default)]
    pub l2: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_batch() -> usize {
    256
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            epochs: 100,
            batch_size: 256,
            l2: 0.0,
            seed: 0,
        }
    }
}

pub(crate) fn fit_logistic(
    params: &LogisticParams,
    x: &[f64],
    n_cols: usize,
    y: &[u32],
    n_classes: usize,
) -> Mlp {
    let mut net = Mlp::initialize(n_cols, n_classes, &[], Activation::Relu, params.l2, 0).zeroed();
    let as_mlp = MlpParams {
        hidden_layers: alloc::vec::Vec::new(),
        activation: Activation::Relu,
        learning_rate: params.learning_rate,
        epochs: params.epochs,
        batch_size: params.batch_size,
        l2: params.l2,
        seed: derive_seed(params.seed, 7),
    };
    net.train(&as_mlp, x, n_cols, y);
    net
}
