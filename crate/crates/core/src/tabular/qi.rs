use alloc::string::String;
use alloc::vec::Vec;

use super::schema::Schema;
use crate::{Error, Result};

/// Features treated as quasi-identifiers, kept in schema order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiIdentifierSet {
    names: Vec<String>,
}

impl QuasiIdentifierSet {
    pub fn new<S: AsRef<str>>(
        schema: &Schema,
        names: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let mut requested = Vec::new();
        for n in names {
            let n = n.as_ref();
            if n == schema.label {
                return Err(Error::InvalidConfig(alloc::format!(
                    "label `{n}` cannot be a quasi-identifier"
                )));
            }
            if schema.feature_index(n).is_none() {
                return Err(Error::UnknownFeature(n.into()));
            }
            requested.push(String::from(n));
        }
        let names: Vec<String> = schema
            .features
            .iter()
            .filter(|f| requested.contains(&f.name))
            .map(|f| f.name.clone())
            .collect();
        if names.is_empty() {
            return Err(Error::EmptyQuasiIdentifiers);
        }
        Ok(Self { names })
    }

    /// Every feature of the schema.
    pub fn all(schema: &Schema) -> Result<Self> {
        Self::new(schema, schema.feature_names())
    }

    pub fn names(&self) -> Vec<&str> {
        self.names.iter().map(String::as_str).collect()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    /// Column positions in `schema`. Fails if a name is missing.
    pub fn indices(&self, schema: &Schema) -> Result<Vec<usize>> {
        self.names
            .iter()
            .map(|n| {
                schema
                    .feature_index(n)
                    .ok_or_else(|| Error::UnknownFeature(n.clone()))
            })
            .collect()
    }

    /// Restriction to names that are also present in `schema`.
    pub fn restrict_to(&self, schema: &Schema) -> Result<Self> {
        let kept: Vec<&str> = self
            .names
            .iter()
            .map(String::as_str)
            .filter(|n| schema.feature_index(n).is_some())
            .collect();
        Self::new(schema, kept)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::FeatureSpec;
    use alloc::vec;

    fn schema() -> Schema {
        Schema::new(
            vec![
                FeatureSpec::numeric("a"),
                FeatureSpec::numeric("b"),
                FeatureSpec::numeric("c"),
            ],
            "y",
            vec!["0".into(), "1".into()],
        )
        .unwrap()
    }

    #[test]
    fn keeps_schema_order_and_dedups() {
        let q = QuasiIdentifierSet::new(&schema(), ["c", "a", "c"]).unwrap();
        assert_eq!(q.names(), vec!["a", "c"]);
    }

    #[test]
    fn rejects_empty_unknown_and_label() {
        let s = schema();
        assert_eq!(
            QuasiIdentifierSet::new::<&str>(&s, []).unwrap_err(),
            Error::EmptyQuasiIdentifiers
        );
        assert_eq!(
            QuasiIdentifierSet::new(&s, ["z"]).unwrap_err(),
            Error::UnknownFeature("z".into())
        );
        assert!(QuasiIdentifierSet::new(&s, ["y"]).is_err());
    }
}
