//! Named quasi-identifier sets and learner presets.

use alloc::vec;

use crate::learners::{
    Activation, ForestParams, LearnerConfig, LogisticParams, MaxFeatures, MlpParams,
    SplitCriterion, TreeParams,
};

pub const ADULT12: &[&str] = &[
    "age",
    "workclass",
    "education-num",
    "marital-status",
    "occupation",
    "relationship",
    "race",
    "sex",
    "capital-gain",
    "capital-loss",
    "hours-per-week",
    "native-country",
];

pub const ADULT10: &[&str] = &[
    "age",
    "workclass",
    "education-num",
    "marital-status",
    "occupation",
    "relationship",
    "race",
    "sex",
    "hours-per-week",
    "native-country",
];

pub const ADULT8: &[&str] = &[
    "workclass",
    "marital-status",
    "occupation",
    "relationship",
    "race",
    "sex",
    "native-country",
    "education-num",
];

pub const LOAN18: &[&str] = &[
    "emp_length",
    "home_ownership",
    "annual_income",
    "zip_code",
    "purpose",
    "dti",
    "delinq_2yrs",
    "inq_last_6mths",
    "mths_since_last_delinq",
    "open_acc",
    "total_acc",
    "mths_since_last_record",
    "pub_rec",
    "revol_bal",
    "revol_util",
    "hardship_flag",
    "last_pymnt_amnt",
    "installment",
];

pub const QI_PRESETS: &[&str] = &["adult12", "adult10", "adult8", "loan18"];

pub fn qi_preset(name: &str) -> Option<&'static [&'static str]> {
    match name {
        "adult12" => Some(ADULT12),
        "adult10" => Some(ADULT10),
        "adult8" => Some(ADULT8),
        "loan18" => Some(LOAN18),
        _ => None,
    }
}

pub const LEARNER_PRESETS: &[&str] = &[
    "dt",
    "dt-full",
    "rf",
    "lr",
    "nn",
    "nn-deep",
    "attack-mlp",
    "attack-rf",
];

/// Learner presets by name, seeded with `seed`.
///
/// - `dt`: CART, Gini, depth <= 10, >= 5 rows per leaf.
/// - `dt-full`: unconstrained CART.
/// - `rf`: 100 fully grown Gini trees, sqrt feature subsampling, bootstrap.
/// - `lr`: multinomial logistic regression.
/// - `nn`: one hidden layer of 100 ReLU units, Adam lr 0.001, 200 epochs of
///   200-row batches.
/// - `nn-deep`: 1024/512/256 tanh units, Adam lr 0.0001.
/// - `attack-mlp`: one hidden layer of 64 ReLU units (membership attack).
/// - `attack-rf`: 100-tree forest with >= 5 rows per leaf (membership attack).
pub fn learner_preset(name: &str, seed: u64) -> Option<LearnerConfig> {
    let cfg = match name {
        "dt" => LearnerConfig::DecisionTree(TreeParams {
            criterion: SplitCriterion::Gini,
            max_depth: Some(10),
            min_samples_leaf: 5,
            max_features: None,
            seed,
        }),
        "dt-full" => LearnerConfig::DecisionTree(TreeParams {
            seed,
            ..TreeParams::default()
        }),
        "rf" => LearnerConfig::RandomForest(ForestParams {
            tree_count: 100,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            criterion: SplitCriterion::Gini,
            max_depth: None,
            min_samples_leaf: 1,
            seed,
        }),
        "lr" => LearnerConfig::LogisticRegression(LogisticParams {
            seed,
            ..LogisticParams::default()
        }),
        "nn" => LearnerConfig::Mlp(MlpParams {
            seed,
            ..MlpParams::default()
        }),
        "nn-deep" => LearnerConfig::Mlp(MlpParams {
            hidden_layers: vec![1024, 512, 256],
            activation: Activation::Tanh,
            learning_rate: 1e-4,
            epochs: 200,
            batch_size: 200,
            l2: 1e-4,
            seed,
        }),
        "attack-mlp" => LearnerConfig::Mlp(MlpParams {
            hidden_layers: vec![64],
            activation: Activation::Relu,
            learning_rate: 1e-3,
            epochs: 100,
            batch_size: 32,
            l2: 1e-4,
            seed,
        }),
        "attack-rf" => LearnerConfig::RandomForest(ForestParams {
            tree_count: 100,
            min_samples_leaf: 5,
            seed,
            ..ForestParams::default()
        }),
        _ => return None,
    };
    Some(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qi_preset_sizes() {
        assert_eq!(qi_preset("adult12").unwrap().len(), 12);
        assert_eq!(qi_preset("adult10").unwrap().len(), 10);
        assert_eq!(qi_preset("adult8").unwrap().len(), 8);
        assert_eq!(qi_preset("loan18").unwrap().len(), 18);
        assert!(qi_preset("adult9").is_none());
    }

    #[test]
    fn every_learner_preset_validates() {
        for name in LEARNER_PRESETS {
            learner_preset(name, 1).unwrap().validate().unwrap();
        }
    }
}
