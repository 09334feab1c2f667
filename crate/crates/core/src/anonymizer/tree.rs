use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::learners::{DecisionTree, SplitCriterion, TreeNode, TreeParams};
use crate::tabular::{ColumnSource, EncodedMatrix};
use crate::{Error, Result};

/// One equivalence class of the anonymized output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafCluster {
    /// Node index of the leaf in [`AnonymizerTree::nodes`].
    pub node: usize,
    pub member_row_ids: Vec<u64>,
    pub majority_label: u32,
    /// Coordinate-wise median of the majority-label members, in the scaled
    /// distance space.
    pub median_point: Vec<f64>,
    pub representative_row_id: u64,
}

/// The fitted partitioning tree and its leaf groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnonymizerTree {
    pub k: usize,
    /// Encoded QI column names (`feature` or `feature=category`).
    pub columns: Vec<String>,
    pub nodes: Vec<TreeNode>,
    pub leaves: Vec<LeafCluster>,
}

impl AnonymizerTree {
    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn min_leaf_size(&self) -> usize {
        self.leaves
            .iter()
            .map(|l| l.member_row_ids.len())
            .min()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Representative {
    /// Position of the chosen row within the cluster slice.
    pub index: usize,
    pub majority_label: u32,
    pub median_point: Vec<f64>,
}

/// Picks the cluster member that stands in for the whole cluster.
///
/// The majority label is found by count (ties: lowest class). The median is
/// taken per coordinate over majority-label rows, using the lower middle
/// element for even counts. The representative is the majority-label row
/// nearest to that median in Euclidean distance; distance ties go to the
/// lowest row id. The result does not depend on the order of the rows.
pub fn choose_representative(
    points: &[&[f64]],
    labels: &[u32],
    row_ids: &[u64],
) -> Representative {
    assert!(!points.is_empty(), "cluster must be nonempty");
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    let mut majority_label = 0;
    let mut best = 0;
    for (&label, &c) in &counts {
        if c > best {
            best = c;
            majority_label = label;
        }
    }
    let majority: Vec<usize> = (0..points.len())
        .filter(|&i| labels[i] == majority_label)
        .collect();

    let dims = points[0].len();
    let mut column = Vec::with_capacity(majority.len());
    let median_point: Vec<f64> = (0..dims)
        .map(|d| {
            column.clear();
            column.extend(majority.iter().map(|&i| points[i][d]));
            column.sort_by(|a, b| a.total_cmp(b));
            column[(column.len() - 1) / 2]
        })
        .collect();

    let mut index = majority[0];
    let mut best_distance = f64::INFINITY;
    for &i in &majority {
        let d: f64 = points[i]
            .iter()
            .zip(&median_point)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        if d < best_distance || (d == best_distance && row_ids[i] < row_ids[index]) {
            best_distance = d;
            index = i;
        }
    }
    Representative {
        index,
        majority_label,
        median_point,
    }
}

/// Numeric columns min-max scaled to [0, 1]; indicator columns unchanged.
fn distance_space(x: &EncodedMatrix) -> Vec<f64> {
    let n_cols = x.n_cols();
    let mut lo = vec![f64::INFINITY; n_cols];
    let mut hi = vec![f64::NEG_INFINITY; n_cols];
    for row in x.rows() {
        for j in 0..n_cols {
            lo[j] = lo[j].min(row[j]);
            hi[j] = hi[j].max(row[j]);
        }
    }
    let numeric: Vec<bool> = x
        .columns()
        .iter()
        .map(|c| c.source == ColumnSource::Numeric)
        .collect();
    let mut out = Vec::with_capacity(x.values().len());
    for row in x.rows() {
        for j in 0..n_cols {
            let v = row[j];
            out.push(if !numeric[j] {
                v
            } else if hi[j] > lo[j] {
                (v - lo[j]) / (hi[j] - lo[j])
            } else {
                0.0
            });
        }
    }
    out
}

/// Grows the anonymizer tree on encoded QI columns and forms its leaf
/// clusters.
///
/// A split is admissible only if both children keep at least `k` rows, so
/// every leaf holds at least `k` rows. The tree itself sees unscaled values
/// (thresholds are per-column, so scaling would not change it); the
/// representative search uses min-max scaled numeric columns.
pub fn build_anonymizer_tree(
    x_qi: &EncodedMatrix,
    y: &[u32],
    n_classes: usize,
    k: usize,
    criterion: SplitCriterion,
) -> Result<AnonymizerTree> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    let n = x_qi.n_rows();
    if n < k {
        return Err(Error::TooFewRows { k, rows: n });
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} labels for {n} rows",
            y.len()
        )));
    }
    if let Some(&bad) = y.iter().find(|&&c| c as usize >= n_classes) {
        return Err(Error::DimensionMismatch(format!(
            "label {bad} outside {n_classes} classes"
        )));
    }
    let params = TreeParams {
        criterion,
        max_depth: None,
        min_samples_leaf: k,
        max_features: None,
        seed: 0,
    };
    let samples: Vec<usize> = (0..n).collect();
    let tree = DecisionTree::fit(&params, x_qi.values(), x_qi.n_cols(), y, n_classes, &samples);

    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, row) in x_qi.rows().enumerate() {
        members.entry(tree.leaf_index(row)).or_default().push(i);
    }

    let scaled = distance_space(x_qi);
    let n_cols = x_qi.n_cols();
    let row_ids = x_qi.row_ids();
    let leaves = members
        .into_iter()
        .map(|(node, rows)| {
            let points: Vec<&[f64]> = rows
                .iter()
                .map(|&i| &scaled[i * n_cols..(i + 1) * n_cols])
                .collect();
            let labels: Vec<u32> = rows.iter().map(|&i| y[i]).collect();
            let ids: Vec<u64> = rows.iter().map(|&i| row_ids[i]).collect();
            let rep = choose_representative(&points, &labels, &ids);
            LeafCluster {
                node,
                member_row_ids: ids.clone(),
                majority_label: rep.majority_label,
                median_point: rep.median_point,
                representative_row_id: ids[rep.index],
            }
        })
        .collect();

    let columns = x_qi.columns().iter().map(|c| c.label.clone()).collect();
    Ok(AnonymizerTree {
        k,
        columns,
        nodes: tree.nodes().to_vec(),
        leaves,
    })
}
