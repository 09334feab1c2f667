//! Membership and attribute inference attacks against trained models.
//!
//! Both attacks return an [`AttackResult`]. For membership inference the
//! positive class is "member"; for attribute inference precision and recall
//! are macro-averaged over the secret feature's values.

mod attribute;
mod membership;

use serde::{Deserialize, Serialize};

pub use attribute::attribute_attack;
pub use membership::{membership_attack, membership_features, AttackModel, MembershipAttackConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackResult {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    /// Number of records the metrics were computed on.
    pub evaluated: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}
