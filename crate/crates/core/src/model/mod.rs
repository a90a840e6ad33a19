//! The three architectures, their losses, checkpoints and training loops.

mod checkpoint;
mod config;
mod ctc_model;
mod loss;
mod phoscnet;
mod probe;
mod train;

use alloc::string::String;

use thiserror::Error;

pub use checkpoint::{Checkpoint, CheckpointHeader, ModelConfig, ModelKind, TensorInfo, CHECKPOINT_VERSION};
pub use config::{default_backbone, CtcConfig, Decoder, PhoscNetConfig, TrainConfig};
pub use ctc_model::{decode, transfer_conv_weights, CtcForward, PhoscCtcModel};
pub use loss::{phosc_loss, PhoscLoss, BCE_EPS};
pub use phoscnet::{PhoscForward, PhoscNetModel};
pub use probe::{CtcProbe, PhoscProbe};
pub use train::{
    best_path_cer, seen_accuracy, train_ctc, train_phoscnet, EpochRecord, Sample, StopReason, TrainLog, Trained,
};

use crate::ctc::CtcError;
use crate::matcher::MatchError;
use crate::metrics::MetricsError;
use crate::netcore::NetError;
use crate::signature::SignatureError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Ctc(#[from] CtcError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("the {0} set is empty")]
    EmptyDataset(&'static str),
    #[error("training loss diverged in epoch {epoch}")]
    DivergedLoss { epoch: usize },
    #[error("label {word:?} needs {required} time steps, the model has {available}")]
    InfeasibleLabel { word: String, required: usize, available: usize },
    #[error("backbone mismatch at layer {layer}: {reason}")]
    SpecMismatch { layer: usize, reason: String },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}
