use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::num::NonZeroUsize;

use serde::{Deserialize, Serialize};

use super::ModelError;
use crate::image::{IMAGE_HEIGHT, IMAGE_WIDTH};
use crate::netcore::{ActivationKind, LayerSpec};

/// Default convolutional feature extractor: three 3x3 convolutions with
/// 16/32/48 channels, the first strided, with 2x2 pooling after the first two.
/// A 50x250 image becomes a 48x6x31 map.
pub fn default_backbone() -> Vec<LayerSpec> {
    let conv = |out_channels, stride| LayerSpec::Conv {
        out_channels,
        kernel: 3,
        stride,
        padding: 1,
    };
    let relu = || LayerSpec::Activation {
        kind: ActivationKind::Relu,
    };
    vec![
        conv(16, 2),
        relu(),
        LayerSpec::MaxPool,
        conv(32, 1),
        relu(),
        LayerSpec::MaxPool,
        conv(48, 1),
        relu(),
    ]
}

fn default_input() -> [usize; 2] {
    [IMAGE_HEIGHT, IMAGE_WIDTH]
}

/// Multi-task PHOC + PHOS network.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhoscNetConfig {
    /// `[height, width]` of the grayscale input.
    #[serde(default = "default_input")]
    pub input: [usize; 2],
    pub backbone: Vec<LayerSpec>,
    pub spp_levels: Vec<usize>,
    /// Width of the hidden layer in each head.
    pub head_hidden: usize,
    pub phoc_len: usize,
    pub phos_len: usize,
}

impl Default for PhoscNetConfig {
    fn default() -> Self {
        Self {
            input: default_input(),
            backbone: default_backbone(),
            spp_levels: vec![1, 2, 4],
            head_hidden: 256,
            phoc_len: 364,
            phos_len: 165,
        }
    }
}

/// Convolution + BiLSTM recognizer trained with CTC.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CtcConfig {
    #[serde(default = "default_input")]
    pub input: [usize; 2],
    pub backbone: Vec<LayerSpec>,
    pub lstm_hidden: usize,
    pub lstm_layers: usize,
    /// Output symbols without the blank, which is always the last class.
    pub alphabet: String,
}

impl Default for CtcConfig {
    fn default() -> Self {
        Self {
            input: default_input(),
            backbone: default_backbone(),
            lstm_hidden: 64,
            lstm_layers: 2,
            alphabet: "abcdefghijklmnopqrstuvwxyz".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub weight_decay: f64,
    /// Adam first-moment decay ("momentum").
    pub momentum: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without validation improvement before the learning rate drops.
    pub patience: usize,
    pub lr_reduction_factor: f64,
    pub seed: u64,
    pub lambda_c: f64,
    pub lambda_s: f64,
}

impl TrainConfig {
    pub fn phoscnet_defaults() -> Self {
        Self {
            learning_rate: 1e-4,
            weight_decay: 5e-5,
            momentum: 0.9,
            batch_size: 16,
            max_epochs: 60,
            patience: 3,
            lr_reduction_factor: 0.25,
            seed: 0,
            lambda_c: 1.0,
            lambda_s: 4.5,
        }
    }

    pub fn ctc_defaults() -> Self {
        Self {
            learning_rate: 1e-3,
            ..Self::phoscnet_defaults()
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |what: &str| Err(ModelError::InvalidConfig(format!("training: {what}")));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return bad("weight_decay must be non-negative");
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return bad("momentum must lie in [0, 1)");
        }
        if self.batch_size == 0 || self.max_epochs == 0 || self.patience == 0 {
            return bad("batch_size, max_epochs and patience must be at least 1");
        }
        if !(self.lr_reduction_factor > 0.0 && self.lr_reduction_factor < 1.0) {
            return bad("lr_reduction_factor must lie in (0, 1)");
        }
        if !(self.lambda_c >= 0.0 && self.lambda_s >= 0.0) || self.lambda_c + self.lambda_s == 0.0 {
            return bad("loss weights must be non-negative and not both zero");
        }
        Ok(())
    }
}

/// CTC decoding strategy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Decoder {
    #[default]
    BestPath,
    Beam { width: NonZeroUsize },
}
