use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::phoscnet::backbone_spec;
use super::{CtcConfig, Decoder, ModelError};
use crate::ctc::{beam_search_decode, best_path_decode, ctc_loss_and_grad_indices, CtcAlphabet, ProbMatrix};
use crate::image::GrayImage;
use crate::netcore::{Activations, LayerSpec, Net, NetSpec, Param, Real, Tensor};

/// Convolutional backbone, height collapse to a `(W, C)` sequence, stacked
/// BiLSTM and a dense layer producing per-step logits over symbols + blank.
#[derive(Clone, Debug)]
pub struct PhoscCtcModel<R: Real = f32> {
    config: CtcConfig,
    seed: u64,
    alphabet: CtcAlphabet,
    pretrained: bool,
    pub(crate) backbone: Net<R>,
    sequence: Net<R>,
}

#[derive(Clone, Debug)]
pub struct CtcForward<R> {
    backbone: Activations<R>,
    sequence: Activations<R>,
}

impl<R: Real> CtcForward<R> {
    /// Row-major `T x classes` logits.
    pub fn logits(&self) -> &Tensor<R> {
        self.sequence.output()
    }
}

impl<R: Real> PhoscCtcModel<R> {
    pub fn new(config: CtcConfig, seed: u64) -> Result<Self, ModelError> {
        let alphabet = CtcAlphabet::new(config.alphabet.chars())?;
        if config.lstm_hidden == 0 || config.lstm_layers == 0 {
            return Err(ModelError::InvalidConfig("LSTM sizes must be positive".into()));
        }
        let backbone = Net::new(backbone_spec(config.input, &config.backbone)?, "backbone", seed)?;
        let sequence = Net::new(
            NetSpec::new(
                backbone.output_shape(),
                vec![
                    LayerSpec::CollapseHeight,
                    LayerSpec::BiLstm {
                        hidden: config.lstm_hidden,
                        num_layers: config.lstm_layers,
                    },
                    LayerSpec::Dense {
                        out: alphabet.num_classes(),
                    },
                ],
            ),
            "sequence",
            seed,
        )?;
        Ok(Self {
            config,
            seed,
            alphabet,
            pretrained: false,
            backbone,
            sequence,
        })
    }

    pub fn config(&self) -> &CtcConfig {
        &self.config
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn alphabet(&self) -> &CtcAlphabet {
        &self.alphabet
    }

    /// Whether the convolutional weights came from a trained PhoscNet.
    pub fn is_pretrained(&self) -> bool {
        self.pretrained
    }

    pub(crate) fn set_pretrained(&mut self, v: bool) {
        self.pretrained = v;
    }

    /// Number of output time steps.
    pub fn time_steps(&self) -> usize {
        self.sequence.output_shape()[0]
    }

    pub fn nets(&self) -> [&Net<R>; 2] {
        [&self.backbone, &self.sequence]
    }

    pub fn nets_mut(&mut self) -> [&mut Net<R>; 2] {
        [&mut self.backbone, &mut self.sequence]
    }

    pub fn params(&self) -> impl Iterator<Item = &Param<R>> {
        self.nets().into_iter().flat_map(|n| n.params().iter())
    }

    pub fn params_mut(&mut self) -> Vec<&mut Param<R>> {
        self.nets_mut().into_iter().flat_map(|n| n.params_mut().iter_mut()).collect()
    }

    pub fn zero_grad(&mut self) {
        for n in self.nets_mut() {
            n.zero_grad();
        }
    }

    /// Encodes a label and checks it fits in the model's time steps.
    pub fn encode_label(&self, word: &str) -> Result<Vec<usize>, ModelError> {
        let label = self.alphabet.encode(word)?;
        let required = crate::ctc::required_steps(&label);
        if required > self.time_steps() {
            return Err(ModelError::InfeasibleLabel {
                word: String::from(word),
                required,
                available: self.time_steps(),
            });
        }
        Ok(label)
    }

    pub fn forward(&self, input: &Tensor<R>) -> Result<CtcForward<R>, ModelError> {
        let backbone = self.backbone.forward(input)?;
        let sequence = self.sequence.forward(backbone.output())?;
        Ok(CtcForward { backbone, sequence })
    }

    /// CTC loss of one sample (computed in `f64`) with gradients accumulated
    /// into the parameters.
    pub fn loss_and_backward(&mut self, input: &Tensor<R>, label: &[usize]) -> Result<f64, ModelError> {
        let fwd = self.forward(input)?;
        let logits: Vec<f64> = fwd.logits().data().iter().map(|v| Real::to_f64(*v)).collect();
        let res = ctc_loss_and_grad_indices(&logits, self.alphabet.num_classes(), label)?;
        let grad = res.grad_wrt_logits.iter().map(|&g| R::from_f64(g)).collect();
        let up = Tensor::from_vec(fwd.logits().shape(), grad)?;
        let g = self.sequence.backward(&fwd.sequence, &up)?;
        self.backbone.backward(&fwd.backbone, &g)?;
        Ok(res.neg_log_prob)
    }

    pub fn predict_probs(&self, image: &GrayImage) -> Result<ProbMatrix, ModelError> {
        let x = image.to_input::<R>(self.config.input[0], self.config.input[1])?;
        let fwd = self.forward(&x)?;
        let shape = fwd.logits().shape();
        let logits: Vec<f64> = fwd.logits().data().iter().map(|v| Real::to_f64(*v)).collect();
        Ok(ProbMatrix::from_logits(shape[0], shape[1], &logits)?)
    }

    pub fn predict_string(&self, image: &GrayImage, decoder: Decoder) -> Result<String, ModelError> {
        let probs = self.predict_probs(image)?;
        decode(&probs, &self.alphabet, decoder)
    }
}

pub fn decode(probs: &ProbMatrix, alphabet: &CtcAlphabet, decoder: Decoder) -> Result<String, ModelError> {
    Ok(match decoder {
        Decoder::BestPath => best_path_decode(probs, alphabet)?,
        Decoder::Beam { width } => beam_search_decode(probs, alphabet, width)?.best,
    })
}

/// Copies the convolutional tensors of a trained PhoscNet into `target`.
/// The two backbones must be identical layer by layer.
pub fn transfer_conv_weights<R: Real>(
    source: &super::Checkpoint,
    mut target: PhoscCtcModel<R>,
) -> Result<PhoscCtcModel<R>, ModelError> {
    let super::ModelConfig::PhoscNet(src) = &source.header.model else {
        return Err(ModelError::SpecMismatch {
            layer: 0,
            reason: "source checkpoint is not a PhoscNet".into(),
        });
    };
    if src.input != target.config.input {
        return Err(ModelError::SpecMismatch {
            layer: 0,
            reason: format!("input {:?} vs {:?}", src.input, target.config.input),
        });
    }
    let (a, b) = (&src.backbone, &target.config.backbone);
    if let Some(i) = (0..a.len().max(b.len())).find(|&i| a.get(i) != b.get(i)) {
        return Err(ModelError::SpecMismatch {
            layer: i,
            reason: format!("source {:?} vs target {:?}", a.get(i), b.get(i)),
        });
    }
    for p in target.backbone.params_mut() {
        let values = source
            .tensor(&p.name)
            .ok_or_else(|| ModelError::Checkpoint(format!("source lacks tensor {}", p.name)))?;
        if values.len() != p.len() {
            return Err(ModelError::Checkpoint(format!("tensor {} has {} values", p.name, values.len())));
        }
        for (dst, &v) in p.value.iter_mut().zip(values) {
            *dst = R::from_f64(f64::from(v));
        }
    }
    target.set_pretrained(true);
    Ok(target)
}
