use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{EquivalenceClassStats, KAnonymityReport};
use crate::anonymizer::LabelSource;
use crate::attacks::AttackResult;
use crate::learners::LearnerKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Accuracy-guided anonymization.
    Ag,
    Mondrian,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Ag => "ag",
            Method::Mondrian => "mondrian",
        }
    }
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Self { mean: 0.0, std: 0.0 };
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Self {
            mean,
            std: libm::sqrt(var),
        }
    }
}

/// Outcome of one seeded run of a cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: u64,
    pub baseline_accuracy: f64,
    pub accuracy: f64,
    pub verification: KAnonymityReport,
    pub classes: EquivalenceClassStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub membership_before: Option<AttackResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub membership_after: Option<AttackResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribute_before: Option<AttackResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribute_after: Option<AttackResult>,
    /// Wall-clock milliseconds; only present when timings are requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

/// One experiment cell: a (dataset, learner, method, k) combination over
/// all configured seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub dataset: String,
    pub learner: String,
    pub learner_kind: LearnerKind,
    pub method: Method,
    pub k: usize,
    pub qi: Vec<String>,
    pub label_source: LabelSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feature_selection: Option<usize>,
    pub seeds: Vec<u64>,
    pub baseline_accuracy: Summary,
    pub accuracy: Summary,
    pub runs: Vec<RunRecord>,
}

impl EvaluationReport {
    /// Ordering key for deterministic report assembly.
    pub fn sort_key(&self) -> (&str, &str, Method, usize) {
        (&self.dataset, &self.learner, self.method, self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_values() {
        let s = Summary::of(&[1.0, 3.0]);
        assert_eq!((s.mean, s.std), (2.0, 1.0));
        assert_eq!(Summary::of(&[]), Summary { mean: 0.0, std: 0.0 });
    }
}
