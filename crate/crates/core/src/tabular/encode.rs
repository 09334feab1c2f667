use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::dataset::{Dataset, Value};
use super::schema::{FeatureKind, Schema};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnSource {
    Numeric,
    Category(u32),
}

/// Provenance of one matrix column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedColumn {
    pub feature: String,
    pub source: ColumnSource,
    /// `feature` for numeric columns, `feature=category` for indicators.
    pub label: String,
}

/// Dense row-major matrix of encoded records.
///
/// Numeric features pass through unscaled; each categorical feature becomes
/// one indicator column per declared category.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedMatrix {
    values: Vec<f64>,
    n_cols: usize,
    columns: Vec<EncodedColumn>,
    row_ids: Vec<u64>,
}

impl EncodedMatrix {
    /// Matrix without a source dataset; columns are named `x0`, `x1`, ...
    /// and row ids are `0..n`.
    pub fn from_raw(values: Vec<f64>, n_cols: usize) -> Result<Self> {
        if n_cols == 0 || !values.len().is_multiple_of(n_cols) {
            return Err(Error::DimensionMismatch(format!(
                "{} values do not fill rows of width {n_cols}",
                values.len()
            )));
        }
        let n_rows = values.len() / n_cols;
        Ok(Self {
            values,
            n_cols,
            columns: (0..n_cols)
                .map(|j| EncodedColumn {
                    feature: format!("x{j}"),
                    source: ColumnSource::Numeric,
                    label: format!("x{j}"),
                })
                .collect(),
            row_ids: (0..n_rows as u64).collect(),
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_raw(rows.concat(), n_cols)
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_cols)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn columns(&self) -> &[EncodedColumn] {
        &self.columns
    }

    pub fn row_ids(&self) -> &[u64] {
        &self.row_ids
    }
}

#[derive(Debug, Clone)]
struct FeatureSlot {
    schema_index: usize,
    name: String,
    kind: FeatureKind,
    start: usize,
    width: usize,
}

/// Reusable encoding of a feature subset of one schema.
#[derive(Debug, Clone)]
pub struct Encoder {
    slots: Vec<FeatureSlot>,
    columns: Vec<EncodedColumn>,
}

impl Encoder {
    pub fn new(schema: &Schema, features: &[&str]) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::InvalidConfig("empty feature subset".into()));
        }
        for f in features {
            if schema.feature_index(f).is_none() {
                return Err(Error::UnknownFeature((*f).into()));
            }
        }
        let mut slots = Vec::new();
        let mut columns = Vec::new();
        for (schema_index, f) in schema.features.iter().enumerate() {
            if !features.contains(&f.name.as_str()) {
                continue;
            }
            let start = columns.len();
            match f.kind {
                FeatureKind::Numeric => columns.push(EncodedColumn {
                    feature: f.name.clone(),
                    source: ColumnSource::Numeric,
                    label: f.name.clone(),
                }),
                FeatureKind::Categorical => {
                    for (c, category) in f.categories.iter().enumerate() {
                        columns.push(EncodedColumn {
                            feature: f.name.clone(),
                            source: ColumnSource::Category(c as u32),
                            label: format!("{}={}", f.name, category),
                        });
                    }
                }
            }
            slots.push(FeatureSlot {
                schema_index,
                name: f.name.clone(),
                kind: f.kind,
                start,
                width: columns.len() - start,
            });
        }
        Ok(Self { slots, columns })
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[EncodedColumn] {
        &self.columns
    }

    pub fn feature_names(&self) -> Vec<&str> {
        self.slots.iter().map(|s| s.name.as_str()).collect()
    }

    /// Appends the encoding of a full schema-ordered value vector to `out`.
    pub fn encode_values(&self, values: &[Value], out: &mut Vec<f64>) {
        for slot in &self.slots {
            match values[slot.schema_index] {
                Value::Numeric(v) => out.push(v),
                Value::Category(c) => {
                    let at = out.len();
                    out.resize(at + slot.width, 0.0);
                    out[at + c as usize] = 1.0;
                }
            }
        }
    }

    pub fn encode(&self, data: &Dataset) -> EncodedMatrix {
        let mut values = Vec::with_capacity(data.len() * self.n_cols());
        for r in data.records() {
            self.encode_values(&r.values, &mut values);
        }
        EncodedMatrix {
            values,
            n_cols: self.n_cols(),
            columns: self.columns.clone(),
            row_ids: data.row_ids(),
        }
    }

    /// Inverse of [`Encoder::encode_values`] for one row: (schema index, value)
    /// per encoded feature. Indicator groups decode to their largest entry.
    pub fn decode_row(&self, row: &[f64]) -> Vec<(usize, Value)> {
        self.slots
            .iter()
            .map(|slot| {
                let v = match slot.kind {
                    FeatureKind::Numeric => Value::Numeric(row[slot.start]),
                    FeatureKind::Categorical => {
                        let group = &row[slot.start..slot.start + slot.width];
                        let mut best = 0;
                        for (i, &x) in group.iter().enumerate() {
                            if x > group[best] {
                                best = i;
                            }
                        }
                        Value::Category(best as u32)
                    }
                };
                (slot.schema_index, v)
            })
            .collect()
    }
}

/// One-hot encodes `features` of `data` (canonical schema order).
pub fn one_hot_encode(data: &Dataset, features: &[&str]) -> Result<EncodedMatrix> {
    Ok(Encoder::new(data.schema(), features)?.encode(data))
}
