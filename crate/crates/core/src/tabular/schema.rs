use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Numeric,
    Categorical,
}

/// One input column. Categories are fixed here, never inferred from data, so
/// every split of a dataset encodes to the same width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<String>,
}

impl FeatureSpec {
    pub fn numeric(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: FeatureKind::Numeric,
            categories: Vec::new(),
        }
    }

    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        categories: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            name: name.into(),
            kind: FeatureKind::Categorical,
            categories: categories.into_iter().map(Into::into).collect(),
        }
    }

    pub fn is_categorical(&self) -> bool {
        self.kind == FeatureKind::Categorical
    }

    pub fn category_index(&self, value: &str) -> Option<u32> {
        self.categories
            .iter()
            .position(|c| c == value)
            .map(|i| i as u32)
    }
}

/// Column layout of a dataset. Feature order is the canonical column order
/// for every matrix built from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub features: Vec<FeatureSpec>,
    pub label: String,
    pub label_classes: Vec<String>,
}

impl Schema {
    pub fn new(
        features: Vec<FeatureSpec>,
        label: impl Into<String>,
        label_classes: Vec<String>,
    ) -> Result<Self> {
        let schema = Self {
            features,
            label: label.into(),
            label_classes,
        };
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for f in &self.features {
            if !seen.insert(f.name.as_str()) {
                return Err(Error::DuplicateFeature(f.name.clone()));
            }
            if f.name == self.label {
                return Err(Error::LabelIsFeature(f.name.clone()));
            }
            match f.kind {
                FeatureKind::Categorical => {
                    if f.categories.is_empty() {
                        return Err(Error::EmptyCategories(f.name.clone()));
                    }
                    let distinct: BTreeSet<_> = f.categories.iter().collect();
                    if distinct.len() != f.categories.len() {
                        return Err(Error::InvalidConfig(alloc::format!(
                            "feature `{}` lists a category twice",
                            f.name
                        )));
                    }
                }
                FeatureKind::Numeric => {
                    if !f.categories.is_empty() {
                        return Err(Error::UnexpectedCategories(f.name.clone()));
                    }
                }
            }
        }
        if self.label_classes.is_empty() {
            return Err(Error::NoLabelClasses);
        }
        let distinct: BTreeSet<_> = self.label_classes.iter().collect();
        if distinct.len() != self.label_classes.len() {
            return Err(Error::InvalidConfig(alloc::format!(
                "label `{}` lists a class twice",
                self.label
            )));
        }
        Ok(())
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn feature(&self, name: &str) -> Option<&FeatureSpec> {
        self.features.iter().find(|f| f.name == name)
    }

    pub fn feature_names(&self) -> Vec<&str> {
        self.features.iter().map(|f| f.name.as_str()).collect()
    }

    pub fn class_index(&self, class: &str) -> Option<u32> {
        self.label_classes
            .iter()
            .position(|c| c == class)
            .map(|i| i as u32)
    }

    pub fn n_classes(&self) -> usize {
        self.label_classes.len()
    }

    /// Schema restricted to `names`, keeping canonical order.
    pub fn project(&self, names: &[&str]) -> Result<Schema> {
        for n in names {
            if self.feature_index(n).is_none() {
                return Err(Error::UnknownFeature((*n).into()));
            }
        }
        let features = self
            .features
            .iter()
            .filter(|f| names.contains(&f.name.as_str()))
            .cloned()
            .collect();
        Ok(Schema {
            features,
            label: self.label.clone(),
            label_classes: self.label_classes.clone(),
        })
    }
}
