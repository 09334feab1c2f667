use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::tree::SplitCriterion;
use crate::tabular::{Dataset, FeatureKind, Value};
use crate::{Error, Result};

/// Information gain of `labels` from each feature on its own.
///
/// Categorical features split into one branch per category. Numeric features
/// use their best single threshold (two branches), the same cut a CART stump
/// would take.
pub fn information_gains(data: &Dataset, labels: &[u32]) -> Result<Vec<f64>> {
    if labels.len() != data.len() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "{} labels for {} rows",
            labels.len(),
            data.len()
        )));
    }
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n_classes = data.schema().n_classes();
    let entropy = SplitCriterion::InformationGain;
    let mut total = vec![0usize; n_classes];
    for &l in labels {
        total[l as usize] += 1;
    }
    let n = labels.len();
    let base = entropy.impurity(&total, n);

    let mut gains = Vec::with_capacity(data.schema().features.len());
    for (j, f) in data.schema().features.iter().enumerate() {
        let conditional = match f.kind {
            FeatureKind::Categorical => {
                let mut counts = vec![vec![0usize; n_classes]; f.categories.len()];
                for (r, &l) in data.records().iter().zip(labels) {
                    if let Value::Category(c) = r.values[j] {
                        counts[c as usize][l as usize] += 1;
                    }
                }
                counts
                    .iter()
                    .map(|c| {
                        let m: usize = c.iter().sum();
                        m as f64 / n as f64 * entropy.impurity(c, m)
                    })
                    .sum::<f64>()
            }
            FeatureKind::Numeric => {
                let mut pairs: Vec<(f64, u32)> = data
                    .records()
                    .iter()
                    .zip(labels)
                    .map(|(r, &l)| (r.values[j].as_numeric().unwrap_or(0.0), l))
                    .collect();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut left = vec![0usize; n_classes];
                let mut right = total.clone();
                let mut best = base;
                for i in 0..n - 1 {
                    left[pairs[i].1 as usize] += 1;
                    right[pairs[i].1 as usize] -= 1;
                    if pairs[i].0 == pairs[i + 1].0 {
                        continue;
                    }
                    let nl = i + 1;
                    let nr = n - nl;
                    let h = (nl as f64 * entropy.impurity(&left, nl)
                        + nr as f64 * entropy.impurity(&right, nr))
                        / n as f64;
                    if h < best {
                        best = h;
                    }
                }
                best
            }
        };
        gains.push(base - conditional);
    }
    Ok(gains)
}

/// The `m` features with the highest information gain; ties keep schema
/// order.
pub fn select_features(data: &Dataset, labels: &[u32], m: usize) -> Result<Vec<String>> {
    let n_features = data.schema().features.len();
    if m == 0 || m > n_features {
        return Err(Error::InvalidConfig(alloc::format!(
            "feature count {m} out of range 1..={n_features}"
        )));
    }
    let gains = information_gains(data, labels)?;
    let mut order: Vec<usize> = (0..n_features).collect();
    order.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]));
    Ok(order
        .into_iter()
        .take(m)
        .map(|j| data.schema().features[j].name.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{FeatureSpec, Record, Schema};

    fn toy() -> (Dataset, Vec<u32>) {
        // a determines y; b is half informative; c is constant.
        let schema = Schema::new(
            vec![
                FeatureSpec::categorical("a", ["p", "q"]),
                FeatureSpec::categorical("b", ["r", "s"]),
                FeatureSpec::numeric("c"),
            ],
            "y",
            vec!["0".into(), "1".into()],
        )
        .unwrap();
        let rows = [(0, 0, 0), (0, 0, 0), (0, 1, 0), (1, 1, 1)];
        let records = rows
            .iter()
            .enumerate()
            .map(|(i, &(a, b, y))| Record {
                id: i as u64,
                values: vec![Value::Category(a), Value::Category(b), Value::Numeric(1.0)],
                label: y,
            })
            .collect();
        let d = Dataset::new(schema, records).unwrap();
        let y = d.labels();
        (d, y)
    }

    fn h(ps: &[f64]) -> f64 {
        -ps.iter()
            .filter(|&&p| p > 0.0)
            .map(|p| p * p.log2())
            .sum::<f64>()
    }

    #[test]
    fn gains_match_hand_entropy() {
        let (d, y) = toy();
        let g = information_gains(&d, &y).unwrap();
        let base = h(&[0.75, 0.25]);
        // a: both branches pure.
        assert!((g[0] - base).abs() < 1e-12);
        // b: r -> {0,0}, s -> {0,1}.
        assert!((g[1] - (base - 0.5 * h(&[0.5, 0.5]))).abs() < 1e-12);
        assert_eq!(g[2], 0.0);
    }

    #[test]
    fn picks_determining_feature_first() {
        let (d, y) = toy();
        assert_eq!(select_features(&d, &y, 1).unwrap(), vec!["a"]);
        assert_eq!(select_features(&d, &y, 2).unwrap(), vec!["a", "b"]);
        assert_eq!(select_features(&d, &y, 3).unwrap(), vec!["a", "b", "c"]);
        assert!(select_features(&d, &y, 0).is_err());
        assert!(select_features(&d, &y, 4).is_err());
    }
}
