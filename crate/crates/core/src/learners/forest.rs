//! Bagged CART ensembles with per-tree feature subsampling.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tree::{DecisionTree, SplitCriterion, TreeParams};
use crate::rng::{derive_seed, seeded};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaxFeatures {
    All,
    #[default]
    Sqrt,
    Count(usize),
}

impl MaxFeatures {
    pub fn resolve(self, n_features: usize) -> Option<usize> {
        match self {
            MaxFeatures::All => None,
            MaxFeatures::Sqrt => {
                Some((libm::sqrt(n_features as f64) as usize).clamp(1, n_features.max(1)))
            }
            MaxFeatures::Count(m) => Some(m.clamp(1, n_features.max(1))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub tree_count: usize,
    #[serde(default)]
    pub max_features: MaxFeatures,
    #[serde(default = "yes")]
    pub bootstrap: bool,
    #[serde(default)]
    pub criterion: SplitCriterion,
    #[serde(default)]
    pub max_depth: Option<usize>,
    #[serde(default = "one")]
    pub min_samples_leaf: usize,
    #[serde(default)]
    pub seed: u64,
}

fn yes() -> bool {
    true
}

fn one() -> usize {
    1
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            tree_count: 100,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            criterion: SplitCriterion::Gini,
            max_depth: None,
            min_samples_leaf: 1,
            seed: 0,
        }
    }
}

/// Sample `n` row positions with replacement.
pub fn bootstrap_indices(seed: u64, n: usize) -> Vec<usize> {
    let mut rng = seeded(seed);
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomForest {
    trees: Vec<DecisionTree>,
    n_classes: usize,
}

impl RandomForest {
    /// Seed of tree `index`; trees never share random streams, so they can be
    /// fitted in any order (or in parallel) with identical results.
    pub fn tree_seed(master: u64, index: usize) -> u64 {
        derive_seed(master, index as u64)
    }

    pub fn fit(params: &ForestParams, x: &[f64], n_cols: usize, y: &[u32], n_classes: usize) -> Self {
        let trees = (0..params.tree_count)
            .map(|i| Self::fit_tree(params, x, n_cols, y, n_classes, i))
            .collect();
        Self { trees, n_classes }
    }

    /// Fits tree `index` of the ensemble in isolation.
    pub fn fit_tree(
        params: &ForestParams,
        x: &[f64],
        n_cols: usize,
        y: &[u32],
        n_classes: usize,
        index: usize,
    ) -> DecisionTree {
        let seed = Self::tree_seed(params.seed, index);
        let n = y.len();
        let samples = if params.bootstrap {
            bootstrap_indices(derive_seed(seed, 0), n)
        } else {
            (0..n).collect()
        };
        let tree_params = TreeParams {
            criterion: params.criterion,
            max_depth: params.max_depth,
            min_samples_leaf: params.min_samples_leaf,
            max_features: params.max_features.resolve(n_cols),
            seed: derive_seed(seed, 1),
        };
        DecisionTree::fit(&tree_params, x, n_cols, y, n_classes, &samples)
    }

    pub fn from_trees(trees: Vec<DecisionTree>, n_classes: usize) -> Self {
        Self { trees, n_classes }
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Mean of the per-tree leaf distributions.
    pub fn predict_proba_row(&self, row: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n_classes];
        for t in &self.trees {
            for (o, p) in out.iter_mut().zip(t.predict_proba_row(row)) {
                *o += p;
            }
        }
        let m = self.trees.len() as f64;
        out.iter_mut().for_each(|o| *o /= m);
        out
    }
}
