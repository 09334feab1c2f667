//! Files, synthetic data, experiments and the command-line tool built on
//! [`anonkit_core`].

pub mod cli;
mod error;
pub mod experiment;
pub mod io;
pub mod parallel;
pub mod synth;

pub use anonkit_core as core;
pub use error::{Error, Result};
