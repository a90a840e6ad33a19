use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{NetError, Param, Real};
use crate::math;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub weight_decay: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-4,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            weight_decay: 5e-5,
        }
    }
}

/// Adam with decoupled weight decay:
/// `p -= lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * p)`.
#[derive(Clone, Debug)]
pub struct Adam {
    pub config: AdamConfig,
    step: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(config: AdamConfig) -> Self {
        Self {
            config,
            step: 0,
            m: Vec::new(),
            v: Vec::new(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Applies one update using the gradients currently held by `params`.
    /// The parameter list must keep the same order and shapes across calls.
    pub fn step<R: Real>(&mut self, params: &mut [&mut Param<R>]) -> Result<(), NetError> {
        if self.m.is_empty() {
            self.m = params.iter().map(|p| vec![0.0; p.len()]).collect();
            self.v = self.m.clone();
        }
        if self.m.len() != params.len() {
            return Err(NetError::ShapeMismatch {
                layer: 0,
                reason: format!("optimizer holds {} tensors, got {}", self.m.len(), params.len()),
            });
        }
        for (k, p) in params.iter().enumerate() {
            if self.m[k].len() != p.len() || p.grad.len() != p.len() {
                return Err(NetError::ShapeMismatch {
                    layer: k,
                    reason: format!("tensor {} changed size", p.name),
                });
            }
        }
        self.step += 1;
        let c = self.config;
        let bias1 = 1.0 - pow(c.beta1, self.step);
        let bias2 = 1.0 - pow(c.beta2, self.step);
        for (k, p) in params.iter_mut().enumerate() {
            let (m, v) = (&mut self.m[k], &mut self.v[k]);
            for j in 0..p.value.len() {
                let g = p.grad[j].to_f64();
                m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g;
                v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g * g;
                let m_hat = m[j] / bias1;
                let v_hat = v[j] / bias2;
                let w = p.value[j].to_f64();
                let update = c.learning_rate * (m_hat / (math::sqrt(v_hat) + c.epsilon) + c.weight_decay * w);
                p.value[j] = R::from_f64(w - update);
            }
        }
        Ok(())
    }
}

fn pow(base: f64, exp: u64) -> f64 {
    let mut acc = 1.0;
    for _ in 0..exp.min(1_000_000) {
        acc *= base;
        if acc == 0.0 {
            break;
        }
    }
    acc
}
