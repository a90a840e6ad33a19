use std::io;
use std::path::{Path, PathBuf};

use phosc_core::ctc::CtcError;
use phosc_core::matcher::MatchError;
use phosc_core::metrics::MetricsError;
use phosc_core::model::ModelError;
use phosc_core::signature::SignatureError;
use phosc_core::synth::{Partition, SynthError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PhoscError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },
    #[error("manifest has no {0} partition")]
    MissingPartition(Partition),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Ctc(#[from] CtcError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

impl PhoscError {
    pub fn read(path: &Path, source: io::Error) -> Self {
        Self::Read {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn write(path: &Path, source: io::Error) -> Self {
        Self::Write {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(path: &Path, reason: impl Into<String>) -> Self {
        Self::Format {
            path: path.to_path_buf(),
            reason: reason.into(),
        }
    }

    /// 2 for problems with what the user supplied, 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_)
            | Self::Config(_)
            | Self::Read { .. }
            | Self::Format { .. }
            | Self::Signature(_)
            | Self::MissingPartition(_) => 2,
            Self::Model(ModelError::InfeasibleLabel { .. } | ModelError::SpecMismatch { .. }) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = PhoscError> = std::result::Result<T, E>;
