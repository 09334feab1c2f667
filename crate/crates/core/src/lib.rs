//! Accuracy-guided k-anonymization of machine-learning training data.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure: given the
//! same inputs and seeds, every operation returns bit-identical results. File
//! formats, the command line and thread pools live in the `anonkit` crate.
//!
//! The main entry points are:
//!
//! - [`tabular`]: schemas, datasets, deterministic splits and one-hot encoding.
//! - [`learners`]: CART trees, random forests, logistic regression and an MLP.
//! - [`anonymizer`]: the accuracy-guided anonymizer and the end-to-end pipeline.
//! - [`mondrian`]: the Median Mondrian baseline.
//! - [`attacks`]: membership and attribute inference harnesses.
//! - [`evaluation`]: independent k-anonymity verification and report rows.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod anonymizer;
pub mod attacks;
mod error;
pub mod evaluation;
pub mod learners;
pub mod mondrian;
pub mod presets;
pub mod rng;
pub mod tabular;
#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
