use alloc::vec;
use alloc::vec::Vec;

use super::{NetError, Real};

/// Dense row-major tensor of up to four dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<R> {
    shape: Vec<usize>,
    data: Vec<R>,
}

impl<R: Real> Tensor<R> {
    pub fn zeros(shape: &[usize]) -> Self {
        Self {
            shape: shape.to_vec(),
            data: vec![R::zero(); shape.iter().product()],
        }
    }

    pub fn from_vec(shape: &[usize], data: Vec<R>) -> Result<Self, NetError> {
        let size: usize = shape.iter().product();
        if size != data.len() || shape.is_empty() || shape.len() > 4 {
            return Err(NetError::ShapeMismatch {
                layer: 0,
                reason: alloc::format!("{} values do not fill shape {shape:?}", data.len()),
            });
        }
        Ok(Self {
            shape: shape.to_vec(),
            data,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[R] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [R] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<R> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn scale(&mut self, by: R) {
        for v in &mut self.data {
            *v *= by;
        }
    }

    pub fn cast<S: Real>(&self) -> Tensor<S> {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| S::from_f64(v.to_f64())).collect(),
        }
    }

    pub(crate) fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}
