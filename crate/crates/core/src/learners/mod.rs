//! Trainable classifiers: CART decision trees, random forests, multinomial
//! logistic regression and multilayer perceptrons.
//!
//! Score semantics of [`ClassificationModel::predict_scores`] differ by kind:
//! trees, forests and logistic regression return class probabilities, the
//! MLP returns raw logits. A model fitted on a single class is constant and
//! scores that class 1.0 and every other class 0.0.

mod adam;
mod forest;
mod logistic;
mod mlp;
mod scaler;
mod select;
mod tree;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use forest::{bootstrap_indices, ForestParams, MaxFeatures, RandomForest};
pub use logistic::LogisticParams;
pub use mlp::{softmax, Activation, Mlp, MlpParams};
pub use scaler::Standardizer;
pub use select::{information_gains, select_features};
pub use tree::{DecisionTree, SplitCriterion, TreeNode, TreeParams};

use crate::tabular::{Dataset, EncodedMatrix, Encoder, Schema};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    DecisionTree,
    RandomForest,
    LogisticRegression,
    Mlp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LearnerConfig {
    DecisionTree(TreeParams),
    RandomForest(ForestParams),
    LogisticRegression(LogisticParams),
    Mlp(MlpParams),
}

impl LearnerConfig {
    pub fn kind(&self) -> LearnerKind {
        match self {
            LearnerConfig::DecisionTree(_) => LearnerKind::DecisionTree,
            LearnerConfig::RandomForest(_) => LearnerKind::RandomForest,
            LearnerConfig::LogisticRegression(_) => LearnerKind::LogisticRegression,
            LearnerConfig::Mlp(_) => LearnerKind::Mlp,
        }
    }

    /// Replaces the seed, leaving every other hyperparameter alone.
    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self {
            LearnerConfig::DecisionTree(p) => p.seed = seed,
            LearnerConfig::RandomForest(p) => p.seed = seed,
            LearnerConfig::LogisticRegression(p) => p.seed = seed,
            LearnerConfig::Mlp(p) => p.seed = seed,
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let check_rate = |lr: f64| {
            if lr.is_finite() && lr > 0.0 {
                Ok(())
            } else {
                bad(format!("learning rate must be > 0, got {lr}"))
            }
        };
        let check_count = |name: &str, v: usize| {
            if v >= 1 {
                Ok(())
            } else {
                bad(format!("{name} must be >= 1"))
            }
        };
        match self {
            LearnerConfig::DecisionTree(p) => {
                check_count("min_samples_leaf", p.min_samples_leaf)?;
                if let Some(d) = p.max_depth {
                    check_count("max_depth", d)?;
                }
                if let Some(m) = p.max_features {
                    check_count("max_features", m)?;
                }
            }
            LearnerConfig::RandomForest(p) => {
                check_count("tree_count", p.tree_count)?;
                check_count("min_samples_leaf", p.min_samples_leaf)?;
                if let Some(d) = p.max_depth {
                    check_count("max_depth", d)?;
                }
                if let MaxFeatures::Count(m) = p.max_features {
                    check_count("max_features", m)?;
                }
            }
            LearnerConfig::LogisticRegression(p) => {
                check_rate(p.learning_rate)?;
                check_count("epochs", p.epochs)?;
                check_count("batch_size", p.batch_size)?;
            }
            LearnerConfig::Mlp(p) => {
                check_rate(p.learning_rate)?;
                check_count("epochs", p.epochs)?;
                check_count("batch_size", p.batch_size)?;
                for &h in &p.hidden_layers {
                    check_count("hidden layer size", h)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum ModelState {
    Constant { class: u32 },
    DecisionTree(DecisionTree),
    RandomForest(RandomForest),
    LogisticRegression(Mlp),
    Mlp(Mlp),
}

/// A fitted classifier over encoded feature rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationModel {
    config: LearnerConfig,
    n_inputs: usize,
    class_count: usize,
    state: ModelState,
}

fn check_training_input(x: &EncodedMatrix, y: &[u32], class_count: usize) -> Result<()> {
    if x.n_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if y.len() != x.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} rows",
            y.len(),
            x.n_rows()
        )));
    }
    if let Some(&bad) = y.iter().find(|&&c| c as usize >= class_count) {
        return Err(Error::DimensionMismatch(format!(
            "label {bad} outside {class_count} classes"
        )));
    }
    for (i, v) in x.values().iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                row: i / x.n_cols(),
                column: i % x.n_cols(),
            });
        }
    }
    Ok(())
}

impl ClassificationModel {
    /// Fits `config` on `x` / `y`. Deterministic for fixed inputs and seed.
    pub fn fit(
        config: &LearnerConfig,
        x: &EncodedMatrix,
        y: &[u32],
        class_count: usize,
    ) -> Result<Self> {
        config.validate()?;
        check_training_input(x, y, class_count)?;
        let n_cols = x.n_cols();
        let values = x.values();
        let state = if y.iter().all(|&c| c == y[0]) {
            ModelState::Constant { class: y[0] }
        } else {
            match config {
                LearnerConfig::DecisionTree(p) => {
                    let samples: Vec<usize> = (0..y.len()).collect();
                    ModelState::DecisionTree(DecisionTree::fit(
                        p,
                        values,
                        n_cols,
                        y,
                        class_count,
                        &samples,
                    ))
                }
                LearnerConfig::RandomForest(p) => ModelState::RandomForest(RandomForest::fit(
                    p,
                    values,
                    n_cols,
                    y,
                    class_count,
                )),
                LearnerConfig::LogisticRegression(p) => ModelState::LogisticRegression(
                    logistic::fit_logistic(p, values, n_cols, y, class_count),
                ),
                LearnerConfig::Mlp(p) => {
                    ModelState::Mlp(Mlp::fit(p, values, n_cols, y, class_count))
                }
            }
        };
        Ok(Self {
            config: config.clone(),
            n_inputs: n_cols,
            class_count,
            state,
        })
    }

    /// Wraps a forest whose trees were fitted elsewhere (e.g. in parallel via
    /// [`RandomForest::fit_tree`]). Falls back to a constant model for
    /// single-class targets, like [`ClassificationModel::fit`].
    pub fn from_forest_trees(
        config: &LearnerConfig,
        x: &EncodedMatrix,
        y: &[u32],
        class_count: usize,
        trees: Vec<DecisionTree>,
    ) -> Result<Self> {
        config.validate()?;
        check_training_input(x, y, class_count)?;
        if !matches!(config, LearnerConfig::RandomForest(_)) {
            return Err(Error::InvalidConfig("not a random forest config".into()));
        }
        let state = if y.iter().all(|&c| c == y[0]) {
            ModelState::Constant { class: y[0] }
        } else {
            ModelState::RandomForest(RandomForest::from_trees(trees, class_count))
        };
        Ok(Self {
            config: config.clone(),
            n_inputs: x.n_cols(),
            class_count,
            state,
        })
    }

    /// Logistic model with all-zero weights (uniform scores).
    pub fn zero_logistic(n_inputs: usize, class_count: usize) -> Self {
        let net = Mlp::initialize(n_inputs, class_count, &[], Activation::Relu, 0.0, 0).zeroed();
        Self {
            config: LearnerConfig::LogisticRegression(LogisticParams::default()),
            n_inputs,
            class_count,
            state: ModelState::LogisticRegression(net),
        }
    }

    pub fn kind(&self) -> LearnerKind {
        self.config.kind()
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.state, ModelState::Constant { .. })
    }

    /// Scores for one encoded row (no layout check).
    pub fn scores_row(&self, row: &[f64]) -> Vec<f64> {
        match &self.state {
            ModelState::Constant { class } => {
                let mut s = vec![0.0; self.class_count];
                s[*class as usize] = 1.0;
                s
            }
            ModelState::DecisionTree(t) => t.predict_proba_row(row).to_vec(),
            ModelState::RandomForest(f) => f.predict_proba_row(row),
            ModelState::LogisticRegression(net) => softmax(&net.logits_row(row)),
            ModelState::Mlp(net) => net.logits_row(row),
        }
    }

    fn check_layout(&self, x: &EncodedMatrix) -> Result<()> {
        if x.n_cols() != self.n_inputs {
            return Err(Error::DimensionMismatch(format!(
                "model expects {} columns, got {}",
                self.n_inputs,
                x.n_cols()
            )));
        }
        Ok(())
    }

    pub fn predict_scores(&self, x: &EncodedMatrix) -> Result<Vec<Vec<f64>>> {
        self.check_layout(x)?;
        Ok(x.rows().map(|r| self.scores_row(r)).collect())
    }

    pub fn predict(&self, x: &EncodedMatrix) -> Result<Vec<u32>> {
        self.check_layout(x)?;
        Ok(x.rows().map(|r| argmax(&self.scores_row(r))).collect())
    }
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> u32 {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best as u32
}

/// A classifier bundled with the schema and feature subset it was trained
/// on, so it can score [`Dataset`]s directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    schema: Schema,
    features: Vec<String>,
    model: ClassificationModel,
}

impl TrainedModel {
    pub fn fit(config: &LearnerConfig, data: &Dataset, features: &[&str]) -> Result<Self> {
        Self::fit_with_labels(config, data, features, &data.labels())
    }

    pub fn fit_with_labels(
        config: &LearnerConfig,
        data: &Dataset,
        features: &[&str],
        labels: &[u32],
    ) -> Result<Self> {
        let encoder = Encoder::new(data.schema(), features)?;
        let x = encoder.encode(data);
        let model = ClassificationModel::fit(config, &x, labels, data.schema().n_classes())?;
        Ok(Self::from_parts(data.schema().clone(), &encoder, model))
    }

    pub fn from_parts(schema: Schema, encoder: &Encoder, model: ClassificationModel) -> Self {
        Self {
            schema,
            features: encoder.feature_names().into_iter().map(String::from).collect(),
            model,
        }
    }

    pub fn model(&self) -> &ClassificationModel {
        &self.model
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn features(&self) -> Vec<&str> {
        self.features.iter().map(String::as_str).collect()
    }

    /// Encoder for `schema`, after checking that every model feature is
    /// declared identically there.
    pub fn encoder_for(&self, schema: &Schema) -> Result<Encoder> {
        for name in &self.features {
            let mine = self.schema.feature(name);
            let theirs = schema.feature(name);
            if mine != theirs {
                return Err(Error::SchemaMismatch(format!(
                    "feature `{name}` differs from the training schema"
                )));
            }
        }
        if schema.label_classes != self.schema.label_classes {
            return Err(Error::SchemaMismatch("label classes differ".into()));
        }
        Encoder::new(schema, &self.features())
    }

    pub fn encode(&self, data: &Dataset) -> Result<EncodedMatrix> {
        Ok(self.encoder_for(data.schema())?.encode(data))
    }

    pub fn predict(&self, data: &Dataset) -> Result<Vec<u32>> {
        self.model.predict(&self.encode(data)?)
    }

    pub fn predict_scores(&self, data: &Dataset) -> Result<Vec<Vec<f64>>> {
        self.model.predict_scores(&self.encode(data)?)
    }

    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        accuracy(self, data)
    }
}

/// Fraction of rows whose prediction matches the label.
pub fn accuracy(model: &TrainedModel, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let predictions = model.predict(data)?;
    let correct = predictions
        .iter()
        .zip(data.records())
        .filter(|(p, r)| **p == r.label)
        .count();
    Ok(correct as f64 / data.len() as f64)
}
