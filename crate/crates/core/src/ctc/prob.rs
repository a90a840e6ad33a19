use alloc::format;
use alloc::vec::Vec;

use crate::math;

use super::CtcError;

const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// `T x (|Σ|+1)` matrix of per-step class probabilities, row-major. The last
/// column is the blank.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ProbMatrix {
    /// Validate and wrap `data`. Rows must be non-negative and sum to one.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, CtcError> {
        if cols < 1 {
            return Err(CtcError::InvalidMatrix("matrix needs at least the blank column".into()));
        }
        if data.len() != rows * cols {
            return Err(CtcError::InvalidMatrix(format!(
                "expected {} values for {rows}x{cols}, got {}",
                rows * cols,
                data.len()
            )));
        }
        for (t, row) in data.chunks_exact(cols).enumerate() {
            if let Some(v) = row.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
                return Err(CtcError::InvalidMatrix(format!("row {t} has invalid entry {v}")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(CtcError::InvalidMatrix(format!("row {t} sums to {sum}")));
            }
        }
        Ok(Self { rows, cols, data })
    }

    /// Row-wise softmax of unnormalised scores.
    pub fn from_logits(rows: usize, cols: usize, logits: &[f64]) -> Result<Self, CtcError> {
        if logits.len() != rows * cols || cols == 0 {
            return Err(CtcError::InvalidMatrix(format!(
                "expected {} logits for {rows}x{cols}, got {}",
                rows * cols,
                logits.len()
            )));
        }
        let mut data = Vec::with_capacity(logits.len());
        for row in logits.chunks_exact(cols) {
            softmax_into(row, &mut data);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn blank(&self) -> usize {
        self.cols - 1
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.data[t * self.cols..(t + 1) * self.cols]
    }

    pub fn get(&self, t: usize, k: usize) -> f64 {
        self.data[t * self.cols + k]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn log_data(&self) -> Vec<f64> {
        self.data.iter().map(|&p| math::ln(p)).collect()
    }
}

pub(crate) fn softmax_into(row: &[f64], out: &mut Vec<f64>) {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let start = out.len();
    let mut sum = 0.0;
    for &x in row {
        let e = math::exp(x - max);
        sum += e;
        out.push(e);
    }
    for v in &mut out[start..] {
        *v /= sum;
    }
}
