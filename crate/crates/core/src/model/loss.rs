use alloc::format;
use alloc::vec::Vec;

use super::ModelError;
use crate::math;
use crate::netcore::Real;

/// Probabilities are clamped to `[BCE_EPS, 1 - BCE_EPS]` inside the log.
pub const BCE_EPS: f64 = 1e-7;

/// Value and output gradients of the weighted multi-task loss.
#[derive(Clone, Debug, PartialEq)]
pub struct PhoscLoss<R> {
    pub total: f64,
    /// Mean binary cross-entropy of the PHOC head.
    pub phoc: f64,
    /// Mean squared error of the PHOS head.
    pub phos: f64,
    pub grad_phoc: Vec<R>,
    pub grad_phos: Vec<R>,
}

/// `lambda_c * BCE(phoc) + lambda_s * MSE(phos)`, both means over vector
/// dimensions, for one sample. Gradients are with respect to the head outputs.
pub fn phosc_loss<R: Real>(
    pred_phoc: &[R],
    pred_phos: &[R],
    true_phoc: &[f32],
    true_phos: &[f32],
    lambda_c: f64,
    lambda_s: f64,
) -> Result<PhoscLoss<R>, ModelError> {
    if pred_phoc.len() != true_phoc.len() || pred_phos.len() != true_phos.len() || pred_phoc.is_empty() || pred_phos.is_empty() {
        return Err(ModelError::ShapeMismatch(format!(
            "predictions ({}, {}) vs targets ({}, {})",
            pred_phoc.len(),
            pred_phos.len(),
            true_phoc.len(),
            true_phos.len()
        )));
    }
    let nc = pred_phoc.len() as f64;
    let mut phoc = 0.0;
    let mut grad_phoc = Vec::with_capacity(pred_phoc.len());
    for (&p, &t) in pred_phoc.iter().zip(true_phoc) {
        let p = p.to_f64().clamp(BCE_EPS, 1.0 - BCE_EPS);
        let t = f64::from(t);
        phoc -= t * math::ln(p) + (1.0 - t) * math::ln(1.0 - p);
        grad_phoc.push(R::from_f64(lambda_c * (p - t) / (p * (1.0 - p)) / nc));
    }
    phoc /= nc;
    let ns = pred_phos.len() as f64;
    let mut phos = 0.0;
    let mut grad_phos = Vec::with_capacity(pred_phos.len());
    for (&p, &t) in pred_phos.iter().zip(true_phos) {
        let d = p.to_f64() - f64::from(t);
        phos += d * d;
        grad_phos.push(R::from_f64(lambda_s * 2.0 * d / ns));
    }
    phos /= ns;
    Ok(PhoscLoss {
        total: lambda_c * phoc + lambda_s * phos,
        phoc,
        phos,
        grad_phoc,
        grad_phos,
    })
}
