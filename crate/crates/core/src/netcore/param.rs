use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::Real;
use crate::rng;

/// A named trainable tensor with its gradient accumulator.
#[derive(Clone, Debug, PartialEq)]
pub struct Param<R> {
    pub name: String,
    pub shape: Vec<usize>,
    pub value: Vec<R>,
    pub grad: Vec<R>,
}

impl<R: Real> Param<R> {
    pub fn zeros(name: String, shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Self {
            name,
            shape: shape.to_vec(),
            value: vec![R::zero(); n],
            grad: vec![R::zero(); n],
        }
    }

    /// Uniform `(-a, a)` with `a = sqrt(6 / (fan_in + fan_out))`, drawn from a
    /// stream keyed by `(seed, name)` so that a parameter's initial value does
    /// not depend on what else the model contains.
    pub fn glorot(name: String, shape: &[usize], fan_in: usize, fan_out: usize, seed: u64) -> Self {
        let mut p = Self::zeros(name, shape);
        let bound = crate::math::sqrt(6.0 / (fan_in + fan_out) as f64);
        let mut rng = rng::stream(seed, &p.name, 0);
        for v in &mut p.value {
            *v = R::from_f64(rng.random_range(-bound..bound));
        }
        p
    }

    pub fn filled(name: String, shape: &[usize], value: R) -> Self {
        let mut p = Self::zeros(name, shape);
        p.value.fill(value);
        p
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }

    pub fn zero_grad(&mut self) {
        self.grad.fill(R::zero());
    }
}
