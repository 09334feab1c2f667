//! Random mixed-type datasets for property tests.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::rng::seeded;
use crate::tabular::{Dataset, FeatureSpec, QuasiIdentifierSet, Record, Schema, Value};

/// `n_features` columns alternating numeric / categorical, binary label
/// loosely tied to the first two columns. Every column is returned as QI.
pub(crate) fn random_dataset(seed: u64, n: usize, n_features: usize) -> (Dataset, QuasiIdentifierSet) {
    let mut rng = seeded(seed);
    let features: Vec<FeatureSpec> = (0..n_features)
        .map(|j| {
            if j % 2 == 0 {
                FeatureSpec::numeric(format!("n{j}"))
            } else {
                let width = rng.random_range(2..6);
                FeatureSpec::categorical(
                    format!("c{j}"),
                    (0..width).map(|c| format!("v{c}")).collect::<Vec<String>>(),
                )
            }
        })
        .collect();
    let schema = Schema::new(features, "y", alloc::vec!["a".into(), "b".into()]).unwrap();
    let records = (0..n)
        .map(|i| {
            let values: Vec<Value> = schema
                .features
                .iter()
                .map(|f| {
                    if f.is_categorical() {
                        Value::Category(rng.random_range(0..f.categories.len() as u32))
                    } else {
                        // Coarse grid so duplicate values occur.
                        Value::Numeric(rng.random_range(0..40) as f64 * 0.5)
                    }
                })
                .collect();
            let signal = values[0].as_numeric().unwrap_or(0.0) > 10.0;
            let label = if rng.random_bool(0.8) { signal as u32 } else { rng.random_range(0..2) };
            Record {
                id: i as u64 * 3 + 1,
                values,
                label,
            }
        })
        .collect();
    let data = Dataset::new(schema, records).unwrap();
    let qi = QuasiIdentifierSet::all(data.schema()).unwrap();
    (data, qi)
}
