use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{ratio, AttackResult};
use crate::learners::{ClassificationModel, LearnerConfig, TrainedModel};
use crate::presets::learner_preset;
use crate::rng::{derive_seed, seeded};
use crate::tabular::{Dataset, EncodedMatrix};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackModel {
    /// A classifier trained on attack features, member = class 1.
    Learner(LearnerConfig),
    /// Member iff the top score reaches a threshold fitted on attack-train.
    MaxScoreThreshold,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipAttackConfig {
    pub attack_model: AttackModel,
    /// Sort each score vector in descending order before use.
    #[serde(default = "default_true")]
    pub sort_scores: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_true() -> bool {
    true
}

impl MembershipAttackConfig {
    /// The `attack-mlp` preset on sorted scores.
    pub fn new(seed: u64) -> Self {
        Self {
            attack_model: AttackModel::Learner(
                learner_preset("attack-mlp", seed).expect("attack-mlp preset exists"),
            ),
            sort_scores: true,
            seed,
        }
    }
}

impl Default for MembershipAttackConfig {
    fn default() -> Self {
        Self::new(0)
    }
}

/// Attack feature rows: target scores (optionally sorted, descending)
/// followed by the one-hot true label.
pub fn membership_features(
    target: &TrainedModel,
    data: &Dataset,
    sort_scores: bool,
) -> Result<Vec<Vec<f64>>> {
    let n_classes = data.schema().n_classes();
    let scores = target.predict_scores(data)?;
    Ok(scores
        .into_iter()
        .zip(data.records())
        .map(|(mut s, r)| {
            if sort_scores {
                s.sort_by(|a, b| b.total_cmp(a));
            }
            let base = s.len();
            s.resize(base + n_classes, 0.0);
            s[base + r.label as usize] = 1.0;
            s
        })
        .collect())
}

/// Runs the strong-knowledge membership attack: the attacker holds labelled
/// members and non-members, trains on half of each and is scored on the rest.
pub fn membership_attack(
    target: &TrainedModel,
    members: &Dataset,
    non_members: &Dataset,
    config: &MembershipAttackConfig,
) -> Result<AttackResult> {
    if members.is_empty() || non_members.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if members.schema() != non_members.schema() {
        return Err(Error::SchemaMismatch(
            "members and non-members use different schemas".into(),
        ));
    }
    let ids: BTreeSet<u64> = members.records().iter().map(|r| r.id).collect();
    if let Some(r) = non_members.records().iter().find(|r| ids.contains(&r.id)) {
        return Err(Error::OverlappingMembers(r.id));
    }
    if let AttackModel::Learner(c) = &config.attack_model {
        c.validate()?;
    }

    let mut inside = membership_features(target, members, config.sort_scores)?;
    let mut outside = membership_features(target, non_members, config.sort_scores)?;
    let per_side = inside.len().min(outside.len());
    shuffle(&mut inside, derive_seed(config.seed, 0));
    shuffle(&mut outside, derive_seed(config.seed, 1));
    inside.truncate(per_side);
    outside.truncate(per_side);
    if per_side < 2 {
        return Err(Error::InvalidConfig(
            "membership attack needs at least two records on each side".into(),
        ));
    }

    let half = per_side / 2;
    let test_in = inside.split_off(half);
    let test_out = outside.split_off(half);
    let train: Vec<(Vec<f64>, bool)> = interleave(inside, outside);
    let test: Vec<(Vec<f64>, bool)> = interleave(test_in, test_out);

    let guesses: Vec<bool> = match &config.attack_model {
        AttackModel::Learner(c) => {
            let rows: Vec<Vec<f64>> = train.iter().map(|(f, _)| f.clone()).collect();
            let y: Vec<u32> = train.iter().map(|(_, m)| *m as u32).collect();
            let x = EncodedMatrix::from_rows(&rows)?;
            let model = ClassificationModel::fit(c, &x, &y, 2)?;
            let rows: Vec<Vec<f64>> = test.iter().map(|(f, _)| f.clone()).collect();
            let x = EncodedMatrix::from_rows(&rows)?;
            model.predict(&x)?.into_iter().map(|p| p == 1).collect()
        }
        AttackModel::MaxScoreThreshold => {
            let n_scores = target.model().class_count();
            let top = |f: &[f64]| f[..n_scores].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let t = fit_threshold(&train.iter().map(|(f, m)| (top(f), *m)).collect::<Vec<_>>());
            test.iter().map(|(f, _)| top(f) >= t).collect()
        }
    };

    let (mut tp, mut fp, mut fneg, mut correct) = (0, 0, 0, 0);
    for (g, (_, m)) in guesses.iter().zip(&test) {
        match (*g, *m) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
            (false, false) => {}
        }
        if g == m {
            correct += 1;
        }
    }
    Ok(AttackResult {
        accuracy: ratio(correct, test.len()),
        precision: ratio(tp, tp + fp),
        recall: ratio(tp, tp + fneg),
        evaluated: test.len(),
    })
}

fn shuffle<T>(rows: &mut [T], seed: u64) {
    rows.shuffle(&mut seeded(seed));
}

fn interleave(a: Vec<Vec<f64>>, b: Vec<Vec<f64>>) -> Vec<(Vec<f64>, bool)> {
    a.into_iter()
        .map(|f| (f, true))
        .chain(b.into_iter().map(|f| (f, false)))
        .collect()
}

/// Threshold maximizing training accuracy of `score >= t` (lowest on ties).
fn fit_threshold(samples: &[(f64, bool)]) -> f64 {
    let mut sorted: Vec<(f64, bool)> = samples.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Threshold at sorted[i].0 labels rows i.. as members.
    let members = sorted.iter().filter(|s| s.1).count();
    let mut best = (members, f64::NEG_INFINITY);
    let mut correct = members;
    for i in 0..sorted.len() {
        correct = if sorted[i].1 { correct - 1 } else { correct + 1 };
        let next_differs = i + 1 == sorted.len() || sorted[i + 1].0 > sorted[i].0;
        if next_differs && correct > best.0 {
            let t = sorted.get(i + 1).map_or(f64::INFINITY, |s| s.0);
            best = (correct, t);
        }
    }
    best.1
}
