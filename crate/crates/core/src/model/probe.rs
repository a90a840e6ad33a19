use alloc::vec::Vec;

use super::{phosc_loss, ModelError, PhoscCtcModel, PhoscNetModel};
use crate::ctc::ctc_loss_and_grad_indices;
use crate::netcore::{Objective, Param, Tensor};

fn locate(params: &[&mut Param<f64>], mut index: usize) -> (usize, usize) {
    for (k, p) in params.iter().enumerate() {
        if index < p.value.len() {
            return (k, index);
        }
        index -= p.value.len();
    }
    panic!("coordinate {index} out of range");
}

/// Finite-difference probe of a PhoscNet plus its multi-task loss on one
/// sample. Coordinates are the parameters in declaration order.
#[derive(Clone, Debug)]
pub struct PhoscProbe {
    pub model: PhoscNetModel<f64>,
    pub input: Tensor<f64>,
    pub phoc: Vec<f32>,
    pub phos: Vec<f32>,
    pub lambda_c: f64,
    pub lambda_s: f64,
}

impl Objective for PhoscProbe {
    type Error = ModelError;

    fn coordinates(&self) -> usize {
        self.model.params().map(|p| p.value.len()).sum()
    }

    fn value(&self, index: usize) -> f64 {
        self.model.params().flat_map(|p| p.value.iter()).nth(index).copied().expect("coordinate in range")
    }

    fn set_value(&mut self, index: usize, value: f64) {
        let mut params = self.model.params_mut();
        let (k, i) = locate(&params, index);
        params[k].value[i] = value;
    }

    fn loss(&mut self) -> Result<f64, ModelError> {
        let fwd = self.model.forward(&self.input)?;
        Ok(phosc_loss(fwd.phoc(), fwd.phos(), &self.phoc, &self.phos, self.lambda_c, self.lambda_s)?.total)
    }

    fn loss_and_gradient(&mut self) -> Result<(f64, Vec<f64>), ModelError> {
        self.model.zero_grad();
        let fwd = self.model.forward(&self.input)?;
        let loss = phosc_loss(fwd.phoc(), fwd.phos(), &self.phoc, &self.phos, self.lambda_c, self.lambda_s)?;
        self.model.backward(&fwd, &loss.grad_phoc, &loss.grad_phos)?;
        Ok((loss.total, self.model.params().flat_map(|p| p.grad.iter().copied()).collect()))
    }
}

/// Finite-difference probe of a CTC model plus its loss on one sample.
#[derive(Clone, Debug)]
pub struct CtcProbe {
    pub model: PhoscCtcModel<f64>,
    pub input: Tensor<f64>,
    pub label: Vec<usize>,
}

impl Objective for CtcProbe {
    type Error = ModelError;

    fn coordinates(&self) -> usize {
        self.model.params().map(|p| p.value.len()).sum()
    }

    fn value(&self, index: usize) -> f64 {
        self.model.params().flat_map(|p| p.value.iter()).nth(index).copied().expect("coordinate in range")
    }

    fn set_value(&mut self, index: usize, value: f64) {
        let mut params = self.model.params_mut();
        let (k, i) = locate(&params, index);
        params[k].value[i] = value;
    }

    fn loss(&mut self) -> Result<f64, ModelError> {
        let fwd = self.model.forward(&self.input)?;
        let classes = self.model.alphabet().num_classes();
        Ok(ctc_loss_and_grad_indices(fwd.logits().data(), classes, &self.label)?.neg_log_prob)
    }

    fn loss_and_gradient(&mut self) -> Result<(f64, Vec<f64>), ModelError> {
        self.model.zero_grad();
        let loss = self.model.loss_and_backward(&self.input, &self.label)?;
        Ok((loss, self.model.params().flat_map(|p| p.grad.iter().copied()).collect()))
    }
}
