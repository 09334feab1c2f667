//! Independent anonymity checks and experiment report rows.

mod report;
mod verify;

pub use report::{EvaluationReport, Method, RunRecord, Summary};
pub use verify::{
    equivalence_class_stats, verify_k_anonymity, EquivalenceClassStats, KAnonymityReport,
    ViolatingTuple,
};
