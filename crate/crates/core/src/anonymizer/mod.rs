//! Accuracy-guided k-anonymization.
//!
//! A CART tree is fitted on the quasi-identifier columns against the original
//! model's predictions, with every leaf forced to hold at least `k` rows. Each
//! leaf becomes one equivalence class: all of its rows take the
//! quasi-identifier values of one real member, the majority-label row closest
//! to the coordinate-wise median of the leaf. Non-QI columns and labels are
//! left untouched, so the output stays in the original feature domain.

mod pipeline;
mod tree;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use pipeline::{
    anonymize_pipeline, anonymize_pipeline_with_oracle, LabelOracle, PipelineConfig,
    PipelineResult,
};
pub use tree::{
    build_anonymizer_tree, choose_representative, AnonymizerTree, LeafCluster, Representative,
};

use crate::learners::SplitCriterion;
use crate::tabular::{one_hot_encode, Dataset, QuasiIdentifierSet};
use crate::{Error, Result};

/// Where the labels that guide the anonymizer tree come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSource {
    #[default]
    ModelPredictions,
    TrueLabels,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnonymizationConfig {
    pub k: usize,
    pub qi: QuasiIdentifierSet,
    pub label_source: LabelSource,
    pub criterion: SplitCriterion,
    /// Recorded with results; the anonymizer itself draws no random numbers.
    pub seed: u64,
}

impl AnonymizationConfig {
    pub fn new(k: usize, qi: QuasiIdentifierSet) -> Self {
        Self {
            k,
            qi,
            label_source: LabelSource::ModelPredictions,
            criterion: SplitCriterion::Gini,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be >= 1".into()));
        }
        if self.qi.is_empty() {
            return Err(Error::EmptyQuasiIdentifiers);
        }
        Ok(())
    }
}

/// Anonymizes `train` guided by `labels` (one per row, e.g. the original
/// model's predictions).
///
/// The output has the same schema, row ids, labels and non-QI values as the
/// input; every row's QI values are those of its leaf representative.
pub fn anonymize(
    train: &Dataset,
    labels: &[u32],
    config: &AnonymizationConfig,
) -> Result<(Dataset, AnonymizerTree)> {
    config.validate()?;
    if labels.len() != train.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {} rows",
            labels.len(),
            train.len()
        )));
    }
    if train.len() < config.k {
        return Err(Error::TooFewRows {
            k: config.k,
            rows: train.len(),
        });
    }
    let qi_columns = config.qi.indices(train.schema())?;
    let x_qi = one_hot_encode(train, &config.qi.names())?;
    let tree = build_anonymizer_tree(
        &x_qi,
        labels,
        train.schema().n_classes(),
        config.k,
        config.criterion,
    )?;

    let position: BTreeMap<u64, usize> = train
        .records()
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id, i))
        .collect();
    let mut records = train.records().to_vec();
    for leaf in &tree.leaves {
        let rep = &train.records()[position[&leaf.representative_row_id]];
        for id in &leaf.member_row_ids {
            let target = &mut records[position[id]];
            for &j in &qi_columns {
                target.values[j] = rep.values[j];
            }
        }
    }
    Ok((train.with_records(records)?, tree))
}

/// Labels for `train` as dictated by `source`: the oracle's predictions or
/// the recorded labels.
pub fn resolve_labels(
    train: &Dataset,
    source: LabelSource,
    oracle: &dyn LabelOracle,
) -> Result<Vec<u32>> {
    match source {
        LabelSource::TrueLabels => Ok(train.labels()),
        LabelSource::ModelPredictions => oracle.labels_for(train),
    }
}
