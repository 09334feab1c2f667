use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::tabular::{Dataset, QuasiIdentifierSet, Value};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolatingTuple {
    /// `feature=value` pairs in QI order.
    pub values: Vec<String>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KAnonymityReport {
    pub k_requested: usize,
    pub min_group_size: usize,
    pub group_count: usize,
    pub violating_tuples: Vec<ViolatingTuple>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceClassStats {
    pub group_count: usize,
    pub min_size: usize,
    pub mean_size: f64,
    pub max_size: usize,
}

type Key = Vec<(u8, u64)>;
type Groups = BTreeMap<Key, (usize, usize)>;

/// Groups rows by their exact QI tuple; value is (count, first row).
fn groups(data: &Dataset, qi: &QuasiIdentifierSet) -> Result<(Vec<usize>, Groups)> {
    let columns = qi.indices(data.schema())?;
    let mut out = Groups::new();
    for (i, r) in data.records().iter().enumerate() {
        let key = columns.iter().map(|&c| r.values[c].group_key()).collect();
        out.entry(key).or_insert((0, i)).0 += 1;
    }
    Ok((columns, out))
}

fn render(data: &Dataset, columns: &[usize], row: usize) -> Vec<String> {
    let r = &data.records()[row];
    columns
        .iter()
        .map(|&c| {
            let f = &data.schema().features[c];
            match r.values[c] {
                Value::Numeric(v) => format!("{}={}", f.name, v),
                Value::Category(i) => format!("{}={}", f.name, f.categories[i as usize]),
            }
        })
        .collect()
}

/// Exact group-by check that every QI tuple occurs at least `k` times.
///
/// An empty dataset has no groups, a minimum group size of 0 and passes
/// vacuously.
pub fn verify_k_anonymity(data: &Dataset, qi: &QuasiIdentifierSet, k: usize) -> Result<KAnonymityReport> {
    let (columns, groups) = groups(data, qi)?;
    let min_group_size = groups.values().map(|g| g.0).min().unwrap_or(0);
    let mut violating: Vec<ViolatingTuple> = groups
        .values()
        .filter(|g| g.0 < k)
        .map(|&(count, row)| ViolatingTuple {
            values: render(data, &columns, row),
            count,
        })
        .collect();
    violating.sort_by(|a, b| a.count.cmp(&b.count).then_with(|| a.values.cmp(&b.values)));
    Ok(KAnonymityReport {
        k_requested: k,
        min_group_size,
        group_count: groups.len(),
        pass: violating.is_empty(),
        violating_tuples: violating,
    })
}

pub fn equivalence_class_stats(data: &Dataset, qi: &QuasiIdentifierSet) -> Result<EquivalenceClassStats> {
    let (_, groups) = groups(data, qi)?;
    let sizes: Vec<usize> = groups.values().map(|g| g.0).collect();
    Ok(EquivalenceClassStats {
        group_count: sizes.len(),
        min_size: sizes.iter().copied().min().unwrap_or(0),
        mean_size: if sizes.is_empty() {
            0.0
        } else {
            data.len() as f64 / sizes.len() as f64
        },
        max_size: sizes.iter().copied().max().unwrap_or(0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anonymizer::{anonymize, AnonymizationConfig};
    use crate::tabular::{FeatureSpec, Record, Schema};
    use crate::testutil::random_dataset;
    use alloc::vec;
    use proptest::prelude::*;

    fn five_rows() -> (Dataset, QuasiIdentifierSet) {
        let schema = Schema::new(
            vec![FeatureSpec::categorical("t", ["A", "B"]), FeatureSpec::numeric("z")],
            "y",
            vec!["0".into()],
        )
        .unwrap();
        let cats = [0, 1, 0, 1, 0];
        let d = Dataset::new(
            schema,
            cats.iter()
                .enumerate()
                .map(|(i, &c)| Record {
                    id: i as u64,
                    values: vec![Value::Category(c), Value::Numeric(i as f64)],
                    label: 0,
                })
                .collect(),
        )
        .unwrap();
        let qi = QuasiIdentifierSet::new(d.schema(), ["t"]).unwrap();
        (d, qi)
    }

    #[test]
    fn three_and_two() {
        let (d, qi) = five_rows();
        let r = verify_k_anonymity(&d, &qi, 2).unwrap();
        assert!(r.pass);
        assert_eq!((r.min_group_size, r.group_count), (2, 2));
        let r = verify_k_anonymity(&d, &qi, 3).unwrap();
        assert!(!r.pass);
        assert_eq!(
            r.violating_tuples,
            vec![ViolatingTuple {
                values: vec!["t=B".into()],
                count: 2
            }]
        );
    }

    #[test]
    fn stats_of_distinct_rows() {
        let (d, _) = five_rows();
        let qi = QuasiIdentifierSet::all(d.schema()).unwrap();
        let s = equivalence_class_stats(&d, &qi).unwrap();
        assert_eq!((s.group_count, s.min_size, s.max_size), (5, 1, 1));
        assert!(verify_k_anonymity(&d, &qi, 1).unwrap().pass);
    }

    #[test]
    fn empty_dataset() {
        let (d, qi) = five_rows();
        let empty = d.with_records(vec![]).unwrap();
        let r = verify_k_anonymity(&empty, &qi, 3).unwrap();
        assert_eq!((r.min_group_size, r.group_count, r.pass), (0, 0, true));
    }

    /// Naive O(n^2) count of rows sharing each row's QI tuple.
    fn pairwise_min(data: &Dataset, qi: &QuasiIdentifierSet) -> usize {
        let cols = qi.indices(data.schema()).unwrap();
        let rs = data.records();
        rs.iter()
            .map(|a| {
                rs.iter()
                    .filter(|b| cols.iter().all(|&c| a.values[c] == b.values[c]))
                    .count()
            })
            .min()
            .unwrap_or(0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn agrees_with_pairwise_count(
            seed in any::<u64>(),
            n in 20usize..200,
            k in prop::sample::select(vec![1usize, 2, 5, 17]),
        ) {
            let (data, qi) = random_dataset(seed, n, 3);
            prop_assume!(n >= k);
            let labels = data.labels();
            let (anon, _) = anonymize(&data, &labels, &AnonymizationConfig::new(k, qi.clone())).unwrap();
            for d in [&data, &anon] {
                let r = verify_k_anonymity(d, &qi, k).unwrap();
                let naive = pairwise_min(d, &qi);
                prop_assert_eq!(r.min_group_size, naive);
                prop_assert_eq!(r.pass, naive >= k);
            }
            prop_assert!(verify_k_anonymity(&anon, &qi, k).unwrap().pass);
        }
    }
}
