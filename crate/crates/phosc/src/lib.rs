//! Std companion of `phosc-core`: file formats, corpus IO, the experiment
//! config, training and evaluation pipelines, and the `phosc` CLI.

pub mod config;
pub mod corpus;
pub mod error;
pub mod formats;
pub mod gradcheck;
pub mod pipeline;

pub use config::{ExperimentConfig, Workspace};
pub use corpus::{build_corpus, Corpus};
pub use error::{PhoscError, Result};
pub use phosc_core as core;
