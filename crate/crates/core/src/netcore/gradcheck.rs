use alloc::vec::Vec;

use rand::seq::index;

use super::{Net, NetError, Tensor};
use crate::rng;

/// A differentiable scalar function of a flat coordinate vector.
pub trait Objective {
    type Error;

    fn coordinates(&self) -> usize;
    fn value(&self, index: usize) -> f64;
    fn set_value(&mut self, index: usize, value: f64);
    fn loss(&mut self) -> Result<f64, Self::Error>;
    /// Loss and the full analytic gradient in coordinate order.
    fn loss_and_gradient(&mut self) -> Result<(f64, Vec<f64>), Self::Error>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradCheckOptions {
    pub epsilon: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for GradCheckOptions {
    fn default() -> Self {
        Self {
            epsilon: 1e-5,
            samples: 200,
            tolerance: 1e-4,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordError {
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckReport {
    pub checked: usize,
    pub max_rel_error: f64,
    pub tolerance: f64,
    /// Up to ten worst coordinates, largest error first.
    pub worst: Vec<CoordError>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.max_rel_error <= self.tolerance
    }
}

/// Denominator floor of [`relative_error`]. Central differences in f64 carry
/// round-off near `1e-16 * |loss| / eps`, so gradients much smaller than this
/// floor cannot be resolved to a relative precision.
pub const REL_ERROR_FLOOR: f64 = 1e-5;

/// `|a - n| / max(|a|, |n|, REL_ERROR_FLOOR)`.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(REL_ERROR_FLOOR)
}

/// Compares the analytic gradient with central differences on a random subset
/// of coordinates (all of them when there are fewer than `samples`).
pub fn grad_check<O: Objective>(obj: &mut O, opts: &GradCheckOptions) -> Result<GradCheckReport, O::Error> {
    let (_, analytic) = obj.loss_and_gradient()?;
    let n = obj.coordinates();
    let picked: Vec<usize> = if n <= opts.samples {
        (0..n).collect()
    } else {
        let mut rng = rng::stream(opts.seed, "gradcheck", 0);
        let mut v = index::sample(&mut rng, n, opts.samples).into_vec();
        v.sort_unstable();
        v
    };
    let mut errors = Vec::with_capacity(picked.len());
    for &i in &picked {
        let orig = obj.value(i);
        obj.set_value(i, orig + opts.epsilon);
        let up = obj.loss()?;
        obj.set_value(i, orig - opts.epsilon);
        let down = obj.loss()?;
        obj.set_value(i, orig);
        let numeric = (up - down) / (2.0 * opts.epsilon);
        errors.push(CoordError {
            index: i,
            analytic: analytic[i],
            numeric,
            rel_error: relative_error(analytic[i], numeric),
        });
    }
    errors.sort_by(|a, b| b.rel_error.total_cmp(&a.rel_error).then(a.index.cmp(&b.index)));
    let max_rel_error = errors.first().map_or(0.0, |e| e.rel_error);
    errors.truncate(10);
    Ok(GradCheckReport {
        checked: picked.len(),
        max_rel_error,
        tolerance: opts.tolerance,
        worst: errors,
    })
}

/// Loss attached to a network output for probing its gradients.
#[derive(Clone, Debug, PartialEq)]
pub enum ProbeLoss {
    /// `dot(r, y)`: the gradient is the vector-Jacobian product with `r`.
    Linear(Vec<f64>),
    /// `0.5 * |y - target|^2`.
    Squared(Vec<f64>),
}

/// A network plus a fixed input as an [`Objective`]; coordinates are all
/// parameters in order followed by the input entries.
#[derive(Clone, Debug)]
pub struct NetProbe {
    pub net: Net<f64>,
    pub input: Tensor<f64>,
    pub loss: ProbeLoss,
}

impl NetProbe {
    fn locate(&self, mut index: usize) -> (Option<usize>, usize) {
        for (k, p) in self.net.params().iter().enumerate() {
            if index < p.len() {
                return (Some(k), index);
            }
            index -= p.len();
        }
        (None, index)
    }

    fn eval(&self, y: &[f64]) -> (f64, Vec<f64>) {
        match &self.loss {
            ProbeLoss::Linear(r) => (y.iter().zip(r).map(|(a, b)| a * b).sum(), r.clone()),
            ProbeLoss::Squared(t) => {
                let d: Vec<f64> = y.iter().zip(t).map(|(a, b)| a - b).collect();
                (0.5 * d.iter().map(|v| v * v).sum::<f64>(), d)
            }
        }
    }
}

impl Objective for NetProbe {
    type Error = NetError;

    fn coordinates(&self) -> usize {
        self.net.num_params() + self.input.len()
    }

    fn value(&self, index: usize) -> f64 {
        match self.locate(index) {
            (Some(k), j) => self.net.params()[k].value[j],
            (None, j) => self.input.data()[j],
        }
    }

    fn set_value(&mut self, index: usize, value: f64) {
        match self.locate(index) {
            (Some(k), j) => self.net.params_mut()[k].value[j] = value,
            (None, j) => self.input.data_mut()[j] = value,
        }
    }

    fn loss(&mut self) -> Result<f64, NetError> {
        let acts = self.net.forward(&self.input)?;
        Ok(self.eval(acts.output().data()).0)
    }

    fn loss_and_gradient(&mut self) -> Result<(f64, Vec<f64>), NetError> {
        let acts = self.net.forward(&self.input)?;
        let (loss, dy) = self.eval(acts.output().data());
        self.net.zero_grad();
        let upstream = Tensor::from_vec(acts.output().shape(), dy)?;
        let gx = self.net.backward(&acts, &upstream)?;
        let mut grad: Vec<f64> = self.net.params().iter().flat_map(|p| p.grad.iter().copied()).collect();
        grad.extend_from_slice(gx.data());
        Ok((loss, grad))
    }
}
