use alloc::vec;
use alloc::vec::Vec;

use crate::math::{self, log_sum_exp as lse2};

use super::{CtcAlphabet, CtcError, ProbMatrix};

const NEG_INF: f64 = f64::NEG_INFINITY;

/// Result of [`ctc_loss_and_grad`].
#[derive(Clone, Debug, PartialEq)]
pub struct CtcLossResult {
    /// `-ln p(label | input)`.
    pub neg_log_prob: f64,
    /// Gradient of `neg_log_prob` with respect to the logits, `T x classes`.
    pub grad_wrt_logits: Vec<f64>,
}

/// Minimum number of time steps needed to emit `label`: one per symbol plus a
/// separating blank between each pair of equal neighbours.
pub fn required_steps(label: &[usize]) -> usize {
    label.len() + label.windows(2).filter(|w| w[0] == w[1]).count()
}

/// Blank-interleaved label: `[-, l1, -, l2, ..., -]`.
fn extend(label: &[usize], blank: usize) -> Vec<usize> {
    let mut ext = Vec::with_capacity(2 * label.len() + 1);
    ext.push(blank);
    for &k in label {
        ext.push(k);
        ext.push(blank);
    }
    ext
}

/// Forward variables in log space, `T x S`. `log_probs` is `T x classes`.
fn forward(log_probs: &[f64], classes: usize, ext: &[usize]) -> Vec<f64> {
    let s_len = ext.len();
    let t_len = log_probs.len() / classes;
    let mut alpha = vec![NEG_INF; t_len * s_len];
    if t_len == 0 {
        return alpha;
    }
    alpha[0] = log_probs[ext[0]];
    if s_len > 1 {
        alpha[1] = log_probs[ext[1]];
    }
    for t in 1..t_len {
        let lp = &log_probs[t * classes..(t + 1) * classes];
        let (prev, cur) = alpha.split_at_mut(t * s_len);
        let prev = &prev[(t - 1) * s_len..];
        let cur = &mut cur[..s_len];
        for s in 0..s_len {
            let mut acc = prev[s];
            if s >= 1 {
                acc = lse2(acc, prev[s - 1]);
            }
            if s >= 2 && ext[s] != ext[s - 2] {
                // ext[s] != ext[s-2] already excludes blanks (blank == blank).
                acc = lse2(acc, prev[s - 2]);
            }
            cur[s] = if acc == NEG_INF { NEG_INF } else { acc + lp[ext[s]] };
        }
    }
    alpha
}

/// Backward variables in log space, excluding the emission at step `t`.
fn backward(log_probs: &[f64], classes: usize, ext: &[usize]) -> Vec<f64> {
    let s_len = ext.len();
    let t_len = log_probs.len() / classes;
    let mut beta = vec![NEG_INF; t_len * s_len];
    if t_len == 0 {
        return beta;
    }
    let last = (t_len - 1) * s_len;
    beta[last + s_len - 1] = 0.0;
    if s_len > 1 {
        beta[last + s_len - 2] = 0.0;
    }
    for t in (0..t_len - 1).rev() {
        let lp = &log_probs[(t + 1) * classes..(t + 2) * classes];
        let (cur, next) = beta.split_at_mut((t + 1) * s_len);
        let cur = &mut cur[t * s_len..];
        let next = &next[..s_len];
        for s in 0..s_len {
            let mut acc = next[s] + lp[ext[s]];
            if s + 1 < s_len {
                acc = lse2(acc, next[s + 1] + lp[ext[s + 1]]);
            }
            if s + 2 < s_len && ext[s + 2] != ext[s] {
                acc = lse2(acc, next[s + 2] + lp[ext[s + 2]]);
            }
            cur[s] = acc;
        }
    }
    beta
}

fn total_log_prob(alpha: &[f64], t_len: usize, s_len: usize, label_empty: bool) -> f64 {
    if t_len == 0 {
        return if label_empty { 0.0 } else { NEG_INF };
    }
    let row = &alpha[(t_len - 1) * s_len..];
    if s_len > 1 {
        lse2(row[s_len - 1], row[s_len - 2])
    } else {
        row[0]
    }
}

/// `ln p(label | probs)` summed over all alignments. Infeasible labels (too
/// few time steps) return `f64::NEG_INFINITY`.
pub fn ctc_log_prob(
    probs: &ProbMatrix,
    label: &str,
    alphabet: &CtcAlphabet,
) -> Result<f64, CtcError> {
    if probs.cols() != alphabet.num_classes() {
        return Err(CtcError::InvalidMatrix(alloc::format!(
            "matrix has {} columns, alphabet needs {}",
            probs.cols(),
            alphabet.num_classes()
        )));
    }
    let label = alphabet.encode(label)?;
    ctc_log_prob_indices(probs, &label)
}

/// [`ctc_log_prob`] with the label given as class indices.
pub fn ctc_log_prob_indices(probs: &ProbMatrix, label: &[usize]) -> Result<f64, CtcError> {
    let blank = probs.blank();
    if let Some(&k) = label.iter().find(|&&k| k >= blank) {
        return Err(CtcError::InvalidClass(k));
    }
    if required_steps(label) > probs.rows() {
        return Ok(NEG_INF);
    }
    let ext = extend(label, blank);
    let alpha = forward(&probs.log_data(), probs.cols(), &ext);
    Ok(total_log_prob(&alpha, probs.rows(), ext.len(), label.is_empty()))
}

/// Loss `-ln p(label | softmax(logits))` and its gradient with respect to the
/// logits. `logits` is row-major `T x alphabet.num_classes()`.
pub fn ctc_loss_and_grad(
    logits: &[f64],
    label: &str,
    alphabet: &CtcAlphabet,
) -> Result<CtcLossResult, CtcError> {
    let label = alphabet.encode(label)?;
    ctc_loss_and_grad_indices(logits, alphabet.num_classes(), &label)
}

/// [`ctc_loss_and_grad`] with the label given as class indices; the blank is
/// class `classes - 1`.
pub fn ctc_loss_and_grad_indices(
    logits: &[f64],
    classes: usize,
    label: &[usize],
) -> Result<CtcLossResult, CtcError> {
    if classes == 0 || !logits.len().is_multiple_of(classes) {
        return Err(CtcError::InvalidMatrix(alloc::format!(
            "{} logits do not form rows of {classes}",
            logits.len()
        )));
    }
    let blank = classes - 1;
    if let Some(&k) = label.iter().find(|&&k| k >= blank) {
        return Err(CtcError::InvalidClass(k));
    }
    let t_len = logits.len() / classes;
    let required = required_steps(label);
    if required > t_len {
        return Err(CtcError::InfeasibleLabel { required, available: t_len });
    }

    let mut log_probs = Vec::with_capacity(logits.len());
    for row in logits.chunks_exact(classes) {
        let max = row.iter().copied().fold(NEG_INF, f64::max);
        let lse = max + math::ln(row.iter().map(|&x| math::exp(x - max)).sum::<f64>());
        log_probs.extend(row.iter().map(|&x| x - lse));
    }

    let ext = extend(label, blank);
    let s_len = ext.len();
    let alpha = forward(&log_probs, classes, &ext);
    let beta = backward(&log_probs, classes, &ext);
    let log_p = total_log_prob(&alpha, t_len, s_len, label.is_empty());

    let mut grad: Vec<f64> = log_probs.iter().map(|&lp| math::exp(lp)).collect();
    for t in 0..t_len {
        let g = &mut grad[t * classes..(t + 1) * classes];
        let a = &alpha[t * s_len..(t + 1) * s_len];
        let b = &beta[t * s_len..(t + 1) * s_len];
        for s in 0..s_len {
            let occ = a[s] + b[s];
            if occ != NEG_INF {
                g[ext[s]] -= math::exp(occ - log_p);
            }
        }
    }
    Ok(CtcLossResult {
        neg_log_prob: -log_p,
        grad_wrt_logits: grad,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sigma_a() -> CtcAlphabet {
        CtcAlphabet::new(['a']).unwrap()
    }

    #[test]
    fn single_step_single_path() {
        let m = ProbMatrix::new(1, 2, vec![0.3, 0.7]).unwrap();
        let lp = ctc_log_prob(&m, "a", &sigma_a()).unwrap();
        assert!((lp - 0.3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn two_steps_three_paths() {
        let m = ProbMatrix::new(2, 2, vec![0.3, 0.7, 0.6, 0.4]).unwrap();
        let expected = (0.3 * 0.6 + 0.3 * 0.4 + 0.7 * 0.6f64).ln();
        let lp = ctc_log_prob(&m, "a", &sigma_a()).unwrap();
        assert!((lp - expected).abs() < 1e-14);
    }

    #[test]
    fn repeated_symbol_needs_blank() {
        let m = ProbMatrix::new(2, 2, vec![0.5, 0.5, 0.5, 0.5]).unwrap();
        assert_eq!(ctc_log_prob(&m, "aa", &sigma_a()).unwrap(), f64::NEG_INFINITY);
        assert_eq!(required_steps(&[0, 0]), 3);
        assert_eq!(required_steps(&[0, 1, 1, 1]), 6);
        let m3 = ProbMatrix::new(3, 2, vec![0.5; 6]).unwrap();
        assert!((ctc_log_prob(&m3, "aa", &sigma_a()).unwrap() - 0.125f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn empty_label_is_all_blank() {
        let m = ProbMatrix::new(2, 2, vec![0.3, 0.7, 0.6, 0.4]).unwrap();
        let lp = ctc_log_prob(&m, "", &sigma_a()).unwrap();
        assert!((lp - (0.7 * 0.4f64).ln()).abs() < 1e-14);
    }

    #[test]
    fn loss_is_shift_invariant() {
        let logits = [0.1, -0.4, 0.3, 1.2, 0.0, -0.7];
        let shifted = [5.1, 4.6, 5.3, 1.2, 0.0, -0.7];
        let ab = CtcAlphabet::new(['a', 'b']).unwrap();
        let l1 = ctc_loss_and_grad(&logits, "ab", &ab).unwrap();
        let l2 = ctc_loss_and_grad(&shifted, "ab", &ab).unwrap();
        assert!((l1.neg_log_prob - l2.neg_log_prob).abs() < 1e-12);
    }

    #[test]
    fn infeasible_loss_is_an_error() {
        let ab = CtcAlphabet::new(['a', 'b']).unwrap();
        assert_eq!(
            ctc_loss_and_grad(&[0.0; 6], "abb", &ab),
            Err(CtcError::InfeasibleLabel { required: 4, available: 2 })
        );
    }

    #[test]
    fn gradient_rows_sum_to_zero() {
        let ab = CtcAlphabet::new(['a', 'b']).unwrap();
        let logits = [0.1, -0.4, 0.3, 1.2, 0.0, -0.7, 0.5, 0.5, -1.0];
        let r = ctc_loss_and_grad(&logits, "ab", &ab).unwrap();
        for row in r.grad_wrt_logits.chunks(3) {
            assert!(row.iter().sum::<f64>().abs() < 1e-12);
        }
    }
}
