use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{CtcConfig, ModelError, PhoscCtcModel, PhoscNetConfig, PhoscNetModel};
use crate::netcore::{Param, Real};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Phoscnet,
    Ctc,
    /// CTC model whose backbone was initialized from a trained PhoscNet.
    CtcP,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "architecture", rename_all = "snake_case")]
pub enum ModelConfig {
    PhoscNet(PhoscNetConfig),
    Ctc(CtcConfig),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorInfo {
    pub name: String,
    pub shape: Vec<usize>,
    pub dtype: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointHeader {
    pub format_version: u32,
    pub kind: ModelKind,
    pub model: ModelConfig,
    pub seed: u64,
    /// CTC output symbols; the blank is class `blank_index`.
    pub alphabet: Option<String>,
    pub blank_index: Option<usize>,
    pub tensors: Vec<TensorInfo>,
}

/// Model parameters in `f32` plus everything needed to rebuild the model.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub header: CheckpointHeader,
    /// One buffer per entry of `header.tensors`, in the same order.
    pub data: Vec<Vec<f32>>,
}

fn collect<'a, R: Real>(params: impl Iterator<Item = &'a Param<R>>) -> (Vec<TensorInfo>, Vec<Vec<f32>>) {
    params
        .map(|p| {
            (
                TensorInfo {
                    name: p.name.clone(),
                    shape: p.shape.clone(),
                    dtype: "f32".into(),
                },
                p.value.iter().map(|v| Real::to_f64(*v) as f32).collect(),
            )
        })
        .unzip()
}

fn restore<R: Real>(ck: &Checkpoint, params: Vec<&mut Param<R>>) -> Result<(), ModelError> {
    if params.len() != ck.data.len() || ck.header.tensors.len() != ck.data.len() {
        return Err(ModelError::Checkpoint(format!(
            "model has {} tensors, checkpoint {}",
            params.len(),
            ck.data.len()
        )));
    }
    for ((p, info), values) in params.into_iter().zip(&ck.header.tensors).zip(&ck.data) {
        if p.name != info.name || p.shape != info.shape || values.len() != p.len() {
            return Err(ModelError::Checkpoint(format!(
                "tensor {} {:?} does not match {} {:?}",
                info.name, info.shape, p.name, p.shape
            )));
        }
        if info.dtype != "f32" {
            return Err(ModelError::Checkpoint(format!("unsupported dtype {}", info.dtype)));
        }
        for (dst, &v) in p.value.iter_mut().zip(values) {
            *dst = R::from_f64(f64::from(v));
        }
    }
    Ok(())
}

impl Checkpoint {
    pub fn tensor(&self, name: &str) -> Option<&[f32]> {
        self.header
            .tensors
            .iter()
            .position(|t| t.name == name)
            .map(|i| self.data[i].as_slice())
    }

    pub fn from_phoscnet<R: Real>(model: &PhoscNetModel<R>) -> Self {
        let (tensors, data) = collect(model.params());
        Self {
            header: CheckpointHeader {
                format_version: CHECKPOINT_VERSION,
                kind: ModelKind::Phoscnet,
                model: ModelConfig::PhoscNet(model.config().clone()),
                seed: model.seed(),
                alphabet: None,
                blank_index: None,
                tensors,
            },
            data,
        }
    }

    pub fn from_ctc<R: Real>(model: &PhoscCtcModel<R>) -> Self {
        let (tensors, data) = collect(model.params());
        Self {
            header: CheckpointHeader {
                format_version: CHECKPOINT_VERSION,
                kind: if model.is_pretrained() { ModelKind::CtcP } else { ModelKind::Ctc },
                model: ModelConfig::Ctc(model.config().clone()),
                seed: model.seed(),
                alphabet: Some(model.alphabet().as_string()),
                blank_index: Some(model.alphabet().blank_index()),
                tensors,
            },
            data,
        }
    }

    fn check_version(&self) -> Result<(), ModelError> {
        if self.header.format_version != CHECKPOINT_VERSION {
            return Err(ModelError::Checkpoint(format!(
                "format version {} is not supported",
                self.header.format_version
            )));
        }
        Ok(())
    }

    pub fn to_phoscnet<R: Real>(&self) -> Result<PhoscNetModel<R>, ModelError> {
        self.check_version()?;
        let ModelConfig::PhoscNet(cfg) = &self.header.model else {
            return Err(ModelError::Checkpoint("not a PhoscNet checkpoint".into()));
        };
        let mut model = PhoscNetModel::new(cfg.clone(), self.header.seed)?;
        restore(self, model.params_mut())?;
        Ok(model)
    }

    pub fn to_ctc<R: Real>(&self) -> Result<PhoscCtcModel<R>, ModelError> {
        self.check_version()?;
        let ModelConfig::Ctc(cfg) = &self.header.model else {
            return Err(ModelError::Checkpoint("not a CTC checkpoint".into()));
        };
        let mut model = PhoscCtcModel::new(cfg.clone(), self.header.seed)?;
        if self.header.blank_index != Some(model.alphabet().blank_index())
            || self.header.alphabet.as_deref() != Some(model.alphabet().as_string().as_str())
        {
            return Err(ModelError::Checkpoint("alphabet or blank index disagrees with the model".into()));
        }
        restore(self, model.params_mut())?;
        model.set_pretrained(self.header.kind == ModelKind::CtcP);
        Ok(model)
    }
}
