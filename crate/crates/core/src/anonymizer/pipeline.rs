use alloc::string::String;
use alloc::vec::Vec;

use super::{anonymize, resolve_labels, AnonymizationConfig, AnonymizerTree, LabelSource};
use crate::learners::{select_features, LearnerConfig, TrainedModel};
use crate::tabular::{split, Dataset};
use crate::{Error, Result};

/// Anything that can label a dataset in place of the original model, such
/// as an external black-box service.
pub trait LabelOracle {
    fn labels_for(&self, data: &Dataset) -> Result<Vec<u32>>;
}

impl LabelOracle for TrainedModel {
    fn labels_for(&self, data: &Dataset) -> Result<Vec<u32>> {
        self.predict(data)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub original: LearnerConfig,
    pub retrain: LearnerConfig,
    pub anonymization: AnonymizationConfig,
    /// Original-model training / anonymization / hold-out test.
    pub fractions: [f64; 3],
    pub seed: u64,
    /// Keep only the `m` most informative features before anonymizing.
    pub feature_selection: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct PipelineResult {
    pub splits: [Dataset; 3],
    /// Features the models use (all schema features without selection).
    pub features: Vec<String>,
    pub original_model: TrainedModel,
    /// Labels that guided the anonymizer tree.
    pub guide_labels: Vec<u32>,
    pub anonymized: Dataset,
    pub tree: AnonymizerTree,
    pub retrained_model: TrainedModel,
    pub baseline_accuracy: f64,
    pub anonymized_accuracy: f64,
}

/// split -> fit original on split 1 -> label split 2 -> anonymize split 2 ->
/// retrain on the anonymized rows -> score both models on split 3.
pub fn anonymize_pipeline(data: &Dataset, config: &PipelineConfig) -> Result<PipelineResult> {
    run(data, config, None)
}

/// Like [`anonymize_pipeline`], but split 2 is labelled by `oracle` instead
/// of the fitted original model (only when the label source asks for
/// predictions).
pub fn anonymize_pipeline_with_oracle(
    data: &Dataset,
    config: &PipelineConfig,
    oracle: &dyn LabelOracle,
) -> Result<PipelineResult> {
    run(data, config, Some(oracle))
}

fn run(
    data: &Dataset,
    config: &PipelineConfig,
    oracle: Option<&dyn LabelOracle>,
) -> Result<PipelineResult> {
    config.anonymization.validate()?;
    config.original.validate()?;
    config.retrain.validate()?;
    let splits = split(data, config.fractions, config.seed)?;
    let [train, anon_split, test] = &splits;

    let features: Vec<String> = match config.feature_selection {
        Some(m) => select_features(train, &train.labels(), m)?,
        None => data
            .schema()
            .features
            .iter()
            .map(|f| f.name.clone())
            .collect(),
    };
    let feature_refs: Vec<&str> = features.iter().map(String::as_str).collect();
    let anon_input = anon_split.project(&feature_refs)?;
    let mut anonymization = config.anonymization.clone();
    anonymization.qi = config
        .anonymization
        .qi
        .restrict_to(anon_input.schema())
        .map_err(|e| match e {
            Error::EmptyQuasiIdentifiers => Error::InvalidConfig(
                "feature selection removed every quasi-identifier".into(),
            ),
            other => other,
        })?;

    let original_model = TrainedModel::fit(&config.original, train, &feature_refs)?;
    let guide_labels = match (config.anonymization.label_source, oracle) {
        (LabelSource::ModelPredictions, Some(o)) => o.labels_for(&anon_input)?,
        (source, _) => resolve_labels(&anon_input, source, &original_model)?,
    };
    let (anonymized, tree) = anonymize(&anon_input, &guide_labels, &anonymization)?;
    let retrained_model = TrainedModel::fit(&config.retrain, &anonymized, &feature_refs)?;
    let baseline_accuracy = original_model.accuracy(test)?;
    let anonymized_accuracy = retrained_model.accuracy(test)?;
    Ok(PipelineResult {
        splits,
        features,
        original_model,
        guide_labels,
        anonymized,
        tree,
        retrained_model,
        baseline_accuracy,
        anonymized_accuracy,
    })
}
