//! Binary CART trees.
//!
//! Numeric columns split at midpoints between consecutive distinct values;
//! one-hot indicator columns are handled the same way (threshold 0.5). A row
//! goes left when `value <= threshold`.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::rng::{seeded, ChaCha8Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitCriterion {
    #[default]
    Gini,
    #[serde(alias = "infogain", alias = "entropy")]
    InformationGain,
}

impl SplitCriterion {
    /// Node impurity from class counts (`n` = sum of counts).
    pub fn impurity(self, counts: &[usize], n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let n = n as f64;
        match self {
            SplitCriterion::Gini => {
                1.0 - counts
                    .iter()
                    .map(|&c| {
                        let p = c as f64 / n;
                        p * p
                    })
                    .sum::<f64>()
            }
            SplitCriterion::InformationGain => -counts
                .iter()
                .filter(|&&c| c > 0)
                .map(|&c| {
                    let p = c as f64 / n;
                    p * libm::log2(p)
                })
                .sum::<f64>(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    #[serde(default)]
    pub criterion: SplitCriterion,
    #[serde(default)]
    pub max_depth: Option<usize>,
    #[serde(default = "one")]
    pub min_samples_leaf: usize,
    /// Features examined per node; `None` means all of them.
    #[serde(default)]
    pub max_features: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> usize {
    1
}

impl Default for TreeParams {
    fn default() -> Self {
        Self {
            criterion: SplitCriterion::Gini,
            max_depth: None,
            min_samples_leaf: 1,
            max_features: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        distribution: Vec<f64>,
        samples: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
    n_features: usize,
    n_classes: usize,
}

struct Pending {
    node: usize,
    samples: Vec<usize>,
    depth: usize,
}

impl DecisionTree {
    /// Grows a tree on the rows listed in `samples` (duplicates allowed, as
    /// produced by bootstrapping). `x` is row-major with `n_cols` columns.
    ///
    /// A split is admissible only when both children receive at least
    /// `min_samples_leaf` samples. Growth stops at purity, at `max_depth`, or
    /// when no admissible split exists. Among equally good splits the first
    /// examined feature and the lowest threshold win.
    pub fn fit(
        params: &TreeParams,
        x: &[f64],
        n_cols: usize,
        y: &[u32],
        n_classes: usize,
        samples: &[usize],
    ) -> Self {
        let mut builder = Builder {
            params,
            x,
            n_cols,
            y,
            n_classes,
            min_leaf: params.min_samples_leaf.max(1),
            rng: seeded(params.seed),
            pairs: Vec::new(),
        };
        let mut nodes = vec![TreeNode::Leaf {
            distribution: Vec::new(),
            samples: 0,
        }];
        let mut stack = vec![Pending {
            node: 0,
            samples: samples.to_vec(),
            depth: 0,
        }];
        while let Some(p) = stack.pop() {
            let counts = builder.class_counts(&p.samples);
            let n = p.samples.len();
            let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
            let depth_reached = params.max_depth.is_some_and(|d| p.depth >= d);
            let split = if pure || depth_reached || n < 2 * builder.min_leaf {
                None
            } else {
                builder.best_split(&p.samples, &counts)
            };
            match split {
                None => {
                    nodes[p.node] = TreeNode::Leaf {
                        distribution: counts
                            .iter()
                            .map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 })
                            .collect(),
                        samples: n,
                    };
                }
                Some((feature, threshold)) => {
                    let (left_samples, right_samples): (Vec<usize>, Vec<usize>) = p
                        .samples
                        .iter()
                        .partition(|&&s| x[s * n_cols + feature] <= threshold);
                    let left = nodes.len();
                    let right = left + 1;
                    for _ in 0..2 {
                        nodes.push(TreeNode::Leaf {
                            distribution: Vec::new(),
                            samples: 0,
                        });
                    }
                    nodes[p.node] = TreeNode::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    };
                    stack.push(Pending {
                        node: right,
                        samples: right_samples,
                        depth: p.depth + 1,
                    });
                    stack.push(Pending {
                        node: left,
                        samples: left_samples,
                        depth: p.depth + 1,
                    });
                }
            }
        }
        Self {
            nodes,
            n_features: n_cols,
            n_classes,
        }
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Index of the leaf node that `row` falls into.
    pub fn leaf_index(&self, row: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                TreeNode::Leaf { .. } => return i,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if row[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// Class distribution of the leaf reached by `row`.
    pub fn predict_proba_row(&self, row: &[f64]) -> &[f64] {
        match &self.nodes[self.leaf_index(row)] {
            TreeNode::Leaf { distribution, .. } => distribution,
            TreeNode::Split { .. } => unreachable!("leaf_index returns leaves"),
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf { .. }))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], i: usize) -> usize {
            match &nodes[i] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => {
                    1 + walk(nodes, *left).max(walk(nodes, *right))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

struct Builder<'a> {
    params: &'a TreeParams,
    x: &'a [f64],
    n_cols: usize,
    y: &'a [u32],
    n_classes: usize,
    min_leaf: usize,
    rng: ChaCha8Rng,
    pairs: Vec<(f64, u32)>,
}

impl Builder<'_> {
    fn class_counts(&self, samples: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes];
        for &s in samples {
            counts[self.y[s] as usize] += 1;
        }
        counts
    }

    fn best_split(&mut self, samples: &[usize], total: &[usize]) -> Option<(usize, f64)> {
        let criterion = self.params.criterion;
        let mut order: Vec<usize> = (0..self.n_cols).collect();
        let budget = match self.params.max_features {
            Some(m) if m < self.n_cols => {
                order.shuffle(&mut self.rng);
                m.max(1)
            }
            _ => self.n_cols,
        };
        let n = samples.len();
        let mut best: Option<(f64, usize, f64)> = None;
        let mut left = vec![0usize; self.n_classes];
        let mut right = vec![0usize; self.n_classes];
        for (visited, &feature) in order.iter().enumerate() {
            // Keep looking past the budget until some admissible split exists.
            if visited >= budget && best.is_some() {
                break;
            }
            self.pairs.clear();
            self.pairs.extend(
                samples
                    .iter()
                    .map(|&s| (self.x[s * self.n_cols + feature], self.y[s])),
            );
            self.pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            if self.pairs[0].0 == self.pairs[n - 1].0 {
                continue;
            }
            left.iter_mut().for_each(|c| *c = 0);
            right.copy_from_slice(total);
            for i in 0..n - 1 {
                let (v, label) = self.pairs[i];
                left[label as usize] += 1;
                right[label as usize] -= 1;
                let next = self.pairs[i + 1].0;
                if v == next {
                    continue;
                }
                let n_left = i + 1;
                let n_right = n - n_left;
                if n_left < self.min_leaf || n_right < self.min_leaf {
                    continue;
                }
                let score = n_left as f64 * criterion.impurity(&left, n_left)
                    + n_right as f64 * criterion.impurity(&right, n_right);
                if best.is_none_or(|(b, _, _)| score < b) {
                    let mut threshold = v + (next - v) / 2.0;
                    if threshold >= next {
                        threshold = v;
                    }
                    best = Some((score, feature, threshold));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}
