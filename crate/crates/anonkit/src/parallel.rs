//! Worker pools and parallel model fitting.
//!
//! Results never depend on the worker count: forest trees carry their own
//! pre-derived seeds and parallel maps collect in input order.

use anonkit_core::learners::{
    ClassificationModel, LearnerConfig, RandomForest, TrainedModel,
};
use anonkit_core::tabular::{Dataset, Encoder};
use rayon::prelude::*;

use crate::{Error, Result};

pub const THREADS_ENV: &str = "ANONKIT_THREADS";

/// Worker cap from `ANONKIT_THREADS`; `None` lets rayon decide.
pub fn thread_cap() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Error::Config(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

pub fn pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Same result as [`TrainedModel::fit_with_labels`], with forest trees
/// fitted on the current rayon pool.
pub fn fit_model(
    config: &LearnerConfig,
    data: &Dataset,
    features: &[&str],
    labels: &[u32],
) -> Result<TrainedModel> {
    let LearnerConfig::RandomForest(params) = config else {
        return Ok(TrainedModel::fit_with_labels(config, data, features, labels)?);
    };
    config.validate()?;
    let encoder = Encoder::new(data.schema(), features)?;
    let x = encoder.encode(data);
    let n_classes = data.schema().n_classes();
    let trees = (0..params.tree_count)
        .into_par_iter()
        .map(|i| RandomForest::fit_tree(params, x.values(), x.n_cols(), labels, n_classes, i))
        .collect();
    let model = ClassificationModel::from_forest_trees(config, &x, labels, n_classes, trees)?;
    Ok(TrainedModel::from_parts(data.schema().clone(), &encoder, model))
}
