//! Median Mondrian k-anonymization (strict multidimensional partitioning).
//!
//! Partitions are split recursively on the quasi-identifier with the widest
//! normalized extent, at its median, as long as both halves keep at least `k`
//! rows. Each final partition is then recoded to concrete values: numeric
//! features to the midpoint of the partition's range, categorical features to
//! the partition's most frequent category (ties: lowest category index).

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::tabular::{Dataset, FeatureKind, QuasiIdentifierSet, Value};
use crate::{Error, Result};

/// Extent of one QI feature over a partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FeatureExtent {
    Numeric { min: f64, max: f64 },
    Categories(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub member_row_ids: Vec<u64>,
    /// One extent per QI feature, in QI order.
    pub extents: Vec<FeatureExtent>,
}

struct Context<'a> {
    data: &'a Dataset,
    columns: Vec<usize>,
    kinds: Vec<FeatureKind>,
    global_range: Vec<f64>,
    global_distinct: Vec<usize>,
    k: usize,
}

impl Context<'_> {
    fn numeric(&self, row: usize, col: usize) -> f64 {
        self.data.records()[row].values[col].as_numeric().unwrap_or(0.0)
    }

    fn category(&self, row: usize, col: usize) -> u32 {
        self.data.records()[row].values[col].as_category().unwrap_or(0)
    }

    fn width(&self, rows: &[usize], q: usize) -> f64 {
        let col = self.columns[q];
        match self.kinds[q] {
            FeatureKind::Numeric => {
                if self.global_range[q] <= 0.0 {
                    return 0.0;
                }
                let (lo, hi) = rows.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| {
                    let v = self.numeric(r, col);
                    (lo.min(v), hi.max(v))
                });
                (hi - lo) / self.global_range[q]
            }
            FeatureKind::Categorical => {
                let mut seen: Vec<u32> = rows.iter().map(|&r| self.category(r, col)).collect();
                seen.sort_unstable();
                seen.dedup();
                seen.len() as f64 / self.global_distinct[q].max(1) as f64
            }
        }
    }

    /// Median cut of `rows` on QI `q`, or `None` if the feature is constant.
    fn median_cut(&self, rows: &[usize], q: usize) -> Option<(Vec<usize>, Vec<usize>)> {
        let col = self.columns[q];
        let goes_left: Vec<bool> = match self.kinds[q] {
            FeatureKind::Numeric => {
                let mut values: Vec<f64> = rows.iter().map(|&r| self.numeric(r, col)).collect();
                values.sort_by(|a, b| a.total_cmp(b));
                let max = *values.last()?;
                if values[0] == max {
                    return None;
                }
                let mut cut = values[(values.len() - 1) / 2];
                if cut >= max {
                    // Median sits on the maximum: cut below it instead.
                    cut = values.iter().rev().copied().find(|&v| v < max)?;
                }
                rows.iter().map(|&r| self.numeric(r, col) <= cut).collect()
            }
            FeatureKind::Categorical => {
                let width = self.data.schema().features[col].categories.len();
                let mut counts = vec![0usize; width];
                for &r in rows {
                    counts[self.category(r, col) as usize] += 1;
                }
                let mut present: Vec<usize> = (0..width).filter(|&c| counts[c] > 0).collect();
                if present.len() < 2 {
                    return None;
                }
                present.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
                let mut left = vec![false; width];
                let mut mass = 0;
                let mut taken = 0;
                for &c in &present {
                    left[c] = true;
                    mass += counts[c];
                    taken += 1;
                    if 2 * mass >= rows.len() {
                        break;
                    }
                }
                if taken == present.len() {
                    left[present[taken - 1]] = false;
                }
                rows.iter().map(|&r| left[self.category(r, col) as usize]).collect()
            }
        };
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (&r, g) in rows.iter().zip(goes_left) {
            if g {
                left.push(r);
            } else {
                right.push(r);
            }
        }
        Some((left, right))
    }

    fn extents(&self, rows: &[usize]) -> Vec<FeatureExtent> {
        (0..self.columns.len())
            .map(|q| {
                let col = self.columns[q];
                match self.kinds[q] {
                    FeatureKind::Numeric => {
                        let (min, max) = rows.iter().fold(
                            (f64::INFINITY, f64::NEG_INFINITY),
                            |(lo, hi), &r| {
                                let v = self.numeric(r, col);
                                (lo.min(v), hi.max(v))
                            },
                        );
                        FeatureExtent::Numeric { min, max }
                    }
                    FeatureKind::Categorical => {
                        let mut c: Vec<u32> = rows.iter().map(|&r| self.category(r, col)).collect();
                        c.sort_unstable();
                        c.dedup();
                        FeatureExtent::Categories(c)
                    }
                }
            })
            .collect()
    }
}

/// Final Mondrian partitions of `train` (depth-first, lower half first).
pub fn mondrian_partitions(
    train: &Dataset,
    qi: &QuasiIdentifierSet,
    k: usize,
) -> Result<Vec<Partition>> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    if train.len() < k {
        return Err(Error::TooFewRows {
            k,
            rows: train.len(),
        });
    }
    let columns = qi.indices(train.schema())?;
    let kinds: Vec<FeatureKind> = columns
        .iter()
        .map(|&c| train.schema().features[c].kind)
        .collect();
    let mut ctx = Context {
        data: train,
        columns,
        kinds,
        global_range: Vec::new(),
        global_distinct: Vec::new(),
        k,
    };
    let all: Vec<usize> = (0..train.len()).collect();
    for q in 0..ctx.columns.len() {
        match ctx.extents(&all).swap_remove(q) {
            FeatureExtent::Numeric { min, max } => {
                ctx.global_range.push(max - min);
                ctx.global_distinct.push(0);
            }
            FeatureExtent::Categories(c) => {
                ctx.global_range.push(0.0);
                ctx.global_distinct.push(c.len());
            }
        }
    }

    let mut done = Vec::new();
    let mut stack = vec![all];
    while let Some(rows) = stack.pop() {
        let widths: Vec<f64> = (0..ctx.columns.len()).map(|q| ctx.width(&rows, q)).collect();
        let mut order: Vec<usize> = (0..ctx.columns.len()).collect();
        order.sort_by(|&a, &b| widths[b].total_cmp(&widths[a]).then(a.cmp(&b)));
        let cut = order.into_iter().find_map(|q| {
            ctx.median_cut(&rows, q)
                .filter(|(l, r)| l.len() >= ctx.k && r.len() >= ctx.k)
        });
        match cut {
            Some((left, right)) => {
                stack.push(right);
                stack.push(left);
            }
            None => done.push(rows),
        }
    }
    Ok(done
        .into_iter()
        .map(|rows| Partition {
            member_row_ids: rows.iter().map(|&r| train.records()[r].id).collect(),
            extents: ctx.extents(&rows),
        })
        .collect())
}

/// Median Mondrian anonymization recoded to concrete values.
pub fn mondrian_anonymize(train: &Dataset, qi: &QuasiIdentifierSet, k: usize) -> Result<Dataset> {
    let partitions = mondrian_partitions(train, qi, k)?;
    let columns = qi.indices(train.schema())?;
    let position: alloc::collections::BTreeMap<u64, usize> = train
        .records()
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id, i))
        .collect();
    let mut records = train.records().to_vec();
    for p in &partitions {
        let rows: Vec<usize> = p.member_row_ids.iter().map(|id| position[id]).collect();
        for (q, &col) in columns.iter().enumerate() {
            let value = match &p.extents[q] {
                FeatureExtent::Numeric { min, max } => Value::Numeric(min + (max - min) / 2.0),
                FeatureExtent::Categories(_) => {
                    let width = train.schema().features[col].categories.len();
                    let mut counts = vec![0usize; width];
                    for &r in &rows {
                        counts[train.records()[r].values[col].as_category().unwrap_or(0) as usize] += 1;
                    }
                    let mut mode = 0;
                    for c in 0..width {
                        if counts[c] > counts[mode] {
                            mode = c;
                        }
                    }
                    Value::Category(mode as u32)
                }
            };
            for &r in &rows {
                records[r].values[col] = value;
            }
        }
    }
    train.with_records(records)
}
