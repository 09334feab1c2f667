use alloc::string::String;

/// Errors produced by the anonymization core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("duplicate feature name `{0}`")]
    DuplicateFeature(String),
    #[error("label `{0}` is also listed as a feature")]
    LabelIsFeature(String),
    #[error("categorical feature `{0}` declares no categories")]
    EmptyCategories(String),
    #[error("numeric feature `{0}` must not declare categories")]
    UnexpectedCategories(String),
    #[error("schema declares no label classes")]
    NoLabelClasses,
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("invalid record at row {row}: {reason}")]
    InvalidRecord { row: usize, reason: String },
    #[error("duplicate row id {0}")]
    DuplicateRowId(u64),
    #[error("quasi-identifier set is empty")]
    EmptyQuasiIdentifiers,
    #[error("invalid split fractions: {0}")]
    InvalidFractions(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("k={k} needs at least {k} rows, got {rows}")]
    TooFewRows { k: usize, rows: usize },
    #[error("member and non-member sets share row id {0}")]
    OverlappingMembers(u64),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("secret feature `{0}` must be a categorical input of the target model")]
    InvalidSecretFeature(String),
    #[error("k-anonymity verification failed: min group size {min_group_size} < k={k}")]
    VerificationFailed { k: usize, min_group_size: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
