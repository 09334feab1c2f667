use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::schema::{FeatureKind, Schema};
use crate::{Error, Result};

/// A single cell: a raw number or an index into the feature's categories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Value {
    Numeric(f64),
    Category(u32),
}

impl Value {
    /// Total-order key used for exact group-by over value tuples.
    /// `-0.0` and `0.0` collapse to the same key.
    pub fn group_key(&self) -> (u8, u64) {
        match *self {
            Value::Numeric(v) => {
                let v = if v == 0.0 { 0.0 } else { v };
                (0, v.to_bits())
            }
            Value::Category(c) => (1, c as u64),
        }
    }

    pub fn as_numeric(&self) -> Option<f64> {
        match *self {
            Value::Numeric(v) => Some(v),
            Value::Category(_) => None,
        }
    }

    pub fn as_category(&self) -> Option<u32> {
        match *self {
            Value::Category(c) => Some(c),
            Value::Numeric(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: u64,
    /// One value per schema feature, in schema order.
    pub values: Vec<Value>,
    pub label: u32,
}

/// Immutable, validated collection of records sharing one schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    records: Vec<Record>,
}

impl Dataset {
    pub fn new(schema: Schema, records: Vec<Record>) -> Result<Self> {
        let mut ids = BTreeSet::new();
        for (row, r) in records.iter().enumerate() {
            check_record(&schema, row, r)?;
            if !ids.insert(r.id) {
                return Err(Error::DuplicateRowId(r.id));
            }
        }
        Ok(Self { schema, records })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn row_ids(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.id).collect()
    }

    pub fn labels(&self) -> Vec<u32> {
        self.records.iter().map(|r| r.label).collect()
    }

    /// Same schema, new records (validated).
    pub fn with_records(&self, records: Vec<Record>) -> Result<Self> {
        Dataset::new(self.schema.clone(), records)
    }

    /// Rows at the given positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            records: positions.iter().map(|&i| self.records[i].clone()).collect(),
        }
    }

    /// Keeps only the named features (canonical order preserved).
    pub fn project(&self, names: &[&str]) -> Result<Dataset> {
        let schema = self.schema.project(names)?;
        let keep: Vec<usize> = schema
            .features
            .iter()
            .map(|f| self.schema.feature_index(&f.name).unwrap())
            .collect();
        let records = self
            .records
            .iter()
            .map(|r| Record {
                id: r.id,
                values: keep.iter().map(|&j| r.values[j]).collect(),
                label: r.label,
            })
            .collect();
        Ok(Dataset { schema, records })
    }
}

fn check_record(schema: &Schema, row: usize, r: &Record) -> Result<()> {
    if r.values.len() != schema.features.len() {
        return Err(Error::InvalidRecord {
            row,
            reason: format!(
                "expected {} values, got {}",
                schema.features.len(),
                r.values.len()
            ),
        });
    }
    for (f, v) in schema.features.iter().zip(&r.values) {
        match (f.kind, v) {
            (FeatureKind::Numeric, Value::Numeric(x)) if x.is_finite() => {}
            (FeatureKind::Numeric, Value::Numeric(_)) => {
                return Err(Error::InvalidRecord {
                    row,
                    reason: format!("non-finite value for `{}`", f.name),
                })
            }
            (FeatureKind::Categorical, Value::Category(c))
                if (*c as usize) < f.categories.len() => {}
            _ => {
                return Err(Error::InvalidRecord {
                    row,
                    reason: format!("invalid value {:?} for `{}`", v, f.name),
                })
            }
        }
    }
    if r.label as usize >= schema.label_classes.len() {
        return Err(Error::InvalidRecord {
            row,
            reason: format!("label index {} out of range", r.label),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::FeatureSpec;
    use alloc::vec;

    fn schema() -> Schema {
        Schema::new(
            vec![
                FeatureSpec::numeric("age"),
                FeatureSpec::categorical("sex", ["F", "M"]),
            ],
            "y",
            vec!["no".into(), "yes".into()],
        )
        .unwrap()
    }

    #[test]
    fn rejects_out_of_range_category() {
        let err = Dataset::new(
            schema(),
            vec![Record {
                id: 0,
                values: vec![Value::Numeric(3.0), Value::Category(2)],
                label: 0,
            }],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidRecord { row: 0, .. }));
    }

    #[test]
    fn rejects_duplicate_ids() {
        let r = Record {
            id: 4,
            values: vec![Value::Numeric(3.0), Value::Category(1)],
            label: 1,
        };
        let err = Dataset::new(schema(), vec![r.clone(), r]).unwrap_err();
        assert_eq!(err, Error::DuplicateRowId(4));
    }

    #[test]
    fn project_keeps_canonical_order() {
        let d = Dataset::new(
            schema(),
            vec![Record {
                id: 0,
                values: vec![Value::Numeric(3.0), Value::Category(1)],
                label: 1,
            }],
        )
        .unwrap();
        let p = d.project(&["sex"]).unwrap();
        assert_eq!(p.schema().feature_names(), vec!["sex"]);
        assert_eq!(p.records()[0].values, vec![Value::Category(1)]);
    }
}
