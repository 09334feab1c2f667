use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use super::{ratio, AttackResult};
use crate::learners::{softmax, LearnerKind, TrainedModel};
use crate::tabular::Dataset;
use crate::{Error, Result};

/// Model-inversion attack on a categorical input feature.
///
/// Each record is completed with every candidate value of `secret_feature`
/// and the candidate giving the record's true label the highest probability
/// is guessed (ties: lowest category index). The record's actual secret value
/// is used only to score the guess.
pub fn attribute_attack(
    target: &TrainedModel,
    data: &Dataset,
    secret_feature: &str,
) -> Result<AttackResult> {
    let schema = data.schema();
    let column = schema
        .feature_index(secret_feature)
        .ok_or_else(|| Error::InvalidSecretFeature(format!("`{secret_feature}` is not in the schema")))?;
    let spec = &schema.features[column];
    if !spec.is_categorical() {
        return Err(Error::InvalidSecretFeature(format!(
            "`{secret_feature}` is numeric"
        )));
    }
    if !target.features().contains(&secret_feature) {
        return Err(Error::InvalidSecretFeature(format!(
            "`{secret_feature}` is not an input of the target model"
        )));
    }
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let encoder = target.encoder_for(schema)?;
    let model = target.model();
    let logits = model.kind() == LearnerKind::Mlp && !model.is_constant();
    let n_values = spec.categories.len();

    let mut guesses = Vec::with_capacity(data.len());
    let mut row = Vec::with_capacity(encoder.n_cols());
    for r in data.records() {
        let mut query = r.values.clone();
        let mut best = (0u32, f64::NEG_INFINITY);
        for c in 0..n_values as u32 {
            query[column] = crate::tabular::Value::Category(c);
            row.clear();
            encoder.encode_values(&query, &mut row);
            let mut s = model.scores_row(&row);
            if logits {
                s = softmax(&s);
            }
            let p = s[r.label as usize];
            if p > best.1 {
                best = (c, p);
            }
        }
        guesses.push(best.0);
    }

    let truth: Vec<u32> = data
        .records()
        .iter()
        .map(|r| r.values[column].as_category().unwrap_or(0))
        .collect();
    let correct = guesses.iter().zip(&truth).filter(|(g, t)| g == t).count();
    let classes: BTreeSet<u32> = guesses.iter().chain(&truth).copied().collect();
    let (mut precision, mut recall) = (0.0, 0.0);
    for &c in &classes {
        let tp = guesses.iter().zip(&truth).filter(|(g, t)| **g == c && **t == c).count();
        precision += ratio(tp, guesses.iter().filter(|&&g| g == c).count());
        recall += ratio(tp, truth.iter().filter(|&&t| t == c).count());
    }
    Ok(AttackResult {
        accuracy: ratio(correct, data.len()),
        precision: precision / classes.len() as f64,
        recall: recall / classes.len() as f64,
        evaluated: data.len(),
    })
}
