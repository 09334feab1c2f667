//! Schema-typed tabular data: datasets, quasi-identifier sets, splits and
//! one-hot encoding.

mod dataset;
mod encode;
mod qi;
mod schema;
mod split;

pub use dataset::{Dataset, Record, Value};
pub use encode::{one_hot_encode, ColumnSource, EncodedColumn, EncodedMatrix, Encoder};
pub use qi::QuasiIdentifierSet;
pub use schema::{FeatureKind, FeatureSpec, Schema};
pub use split::{split, subsample};
