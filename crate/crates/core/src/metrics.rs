//! Evaluation metrics: top-1 accuracy, GZSL harmonic mean, edit distance,
//! character error rate and the length-wise confusion matrix.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("no samples to evaluate")]
    Empty,
    #[error("{predictions} predictions for {truths} ground-truth labels")]
    LengthMismatch { predictions: usize, truths: usize },
    #[error("accuracy {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("ground-truth label {0} is empty")]
    EmptyTruth(usize),
}

fn check_pairs<P, T>(predictions: &[P], truths: &[T]) -> Result<(), MetricsError> {
    if predictions.len() != truths.len() {
        return Err(MetricsError::LengthMismatch {
            predictions: predictions.len(),
            truths: truths.len(),
        });
    }
    if truths.is_empty() {
        return Err(MetricsError::Empty);
    }
    Ok(())
}

/// Fraction of exact matches.
pub fn top1_accuracy<P: AsRef<str>, T: AsRef<str>>(
    predictions: &[P],
    truths: &[T],
) -> Result<f64, MetricsError> {
    check_pairs(predictions, truths)?;
    let hits = predictions
        .iter()
        .zip(truths)
        .filter(|(p, t)| p.as_ref() == t.as_ref())
        .count();
    Ok(hits as f64 / truths.len() as f64)
}

/// `2 A_u A_s / (A_u + A_s)`, zero when both are zero.
pub fn harmonic_mean(unseen: f64, seen: f64) -> Result<f64, MetricsError> {
    for v in [unseen, seen] {
        if !(0.0..=1.0).contains(&v) {
            return Err(MetricsError::OutOfRange(v));
        }
    }
    if unseen + seen == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * unseen * seen / (unseen + seen))
}

/// Levenshtein distance over Unicode scalar values.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitute = prev[j] + usize::from(ca != cb);
            cur[j + 1] = substitute.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Character error rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cer {
    /// Mean of `ED(pred, truth) / |truth|` over samples (the reported CER).
    pub mean: f64,
    /// The same terms summed, without dividing by the sample count.
    pub sum: f64,
}

pub fn cer<P: AsRef<str>, T: AsRef<str>>(
    predictions: &[P],
    truths: &[T],
) -> Result<Cer, MetricsError> {
    check_pairs(predictions, truths)?;
    let mut sum = 0.0;
    for (i, (p, t)) in predictions.iter().zip(truths).enumerate() {
        let len = t.as_ref().chars().count();
        if len == 0 {
            return Err(MetricsError::EmptyTruth(i));
        }
        sum += edit_distance(p.as_ref(), t.as_ref()) as f64 / len as f64;
    }
    Ok(Cer {
        mean: sum / truths.len() as f64,
        sum,
    })
}

/// Counts of (predicted length, true length) pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthConfusion {
    /// `counts[p][t]`: samples whose prediction has `p` characters and whose
    /// truth has `t`. Square, sized by the longest length seen.
    pub counts: Vec<Vec<u64>>,
    /// `counts` with every non-empty true-length column scaled to sum to one.
    pub normalized: Vec<Vec<f64>>,
    /// Number of samples per true length.
    pub samples_per_true_length: Vec<u64>,
    /// Number of samples per predicted length.
    pub samples_per_predicted_length: Vec<u64>,
    /// Number of distinct true labels per true length.
    pub classes_per_true_length: Vec<u64>,
}

pub fn length_confusion<P: AsRef<str>, T: AsRef<str>>(
    predictions: &[P],
    truths: &[T],
) -> Result<LengthConfusion, MetricsError> {
    check_pairs(predictions, truths)?;
    let pairs: Vec<(usize, usize)> = predictions
        .iter()
        .zip(truths)
        .map(|(p, t)| (p.as_ref().chars().count(), t.as_ref().chars().count()))
        .collect();
    let size = pairs.iter().map(|&(p, t)| p.max(t)).max().unwrap_or(0) + 1;
    let mut counts = vec![vec![0u64; size]; size];
    for &(p, t) in &pairs {
        counts[p][t] += 1;
    }
    let samples_per_true_length: Vec<u64> =
        (0..size).map(|t| counts.iter().map(|row| row[t]).sum()).collect();
    let samples_per_predicted_length: Vec<u64> =
        counts.iter().map(|row| row.iter().sum()).collect();
    let normalized = counts
        .iter()
        .map(|row| {
            row.iter()
                .zip(&samples_per_true_length)
                .map(|(&c, &col)| if col == 0 { 0.0 } else { c as f64 / col as f64 })
                .collect()
        })
        .collect();
    let mut distinct: Vec<&str> = truths.iter().map(|t| t.as_ref()).collect();
    distinct.sort_unstable();
    distinct.dedup();
    let mut classes_per_true_length = vec![0u64; size];
    for t in distinct {
        classes_per_true_length[t.chars().count()] += 1;
    }
    Ok(LengthConfusion {
        counts,
        normalized,
        samples_per_true_length,
        samples_per_predicted_length,
        classes_per_true_length,
    })
}

/// Outcome of a ZSL / GZSL evaluation run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Top-1 accuracy on unseen-class test samples.
    pub a_u: f64,
    /// Top-1 accuracy on seen-class test samples.
    pub a_s: f64,
    /// Harmonic mean of `a_u` and `a_s`.
    pub h: f64,
    /// CER over seen and unseen test samples together.
    pub cer: Option<Cer>,
    pub cer_seen: Option<Cer>,
    pub cer_unseen: Option<Cer>,
    pub seen_samples: usize,
    pub seen_correct: usize,
    pub unseen_samples: usize,
    pub unseen_correct: usize,
    pub length_confusion: LengthConfusion,
}

impl EvalReport {
    /// Build a report from seen and unseen (prediction, truth) pairs.
    pub fn from_predictions<S: AsRef<str>>(
        seen: &[(S, S)],
        unseen: &[(S, S)],
        with_cer: bool,
    ) -> Result<Self, MetricsError> {
        fn split<S: AsRef<str>>(pairs: &[(S, S)]) -> (Vec<&str>, Vec<&str>) {
            pairs.iter().map(|(p, t)| (p.as_ref(), t.as_ref())).unzip()
        }
        let (seen_pred, seen_true) = split(seen);
        let (unseen_pred, unseen_true) = split(unseen);
        let a_s = top1_accuracy(&seen_pred, &seen_true)?;
        let a_u = top1_accuracy(&unseen_pred, &unseen_true)?;
        let mut all_pred = seen_pred.clone();
        all_pred.extend_from_slice(&unseen_pred);
        let mut all_true = seen_true.clone();
        all_true.extend_from_slice(&unseen_true);
        let (cer_all, cer_seen, cer_unseen) = if with_cer {
            (
                Some(cer(&all_pred, &all_true)?),
                Some(cer(&seen_pred, &seen_true)?),
                Some(cer(&unseen_pred, &unseen_true)?),
            )
        } else {
            (None, None, None)
        };
        Ok(Self {
            a_u,
            a_s,
            h: harmonic_mean(a_u, a_s)?,
            cer: cer_all,
            cer_seen,
            cer_unseen,
            seen_samples: seen.len(),
            seen_correct: seen.iter().filter(|(p, t)| p.as_ref() == t.as_ref()).count(),
            unseen_samples: unseen.len(),
            unseen_correct: unseen.iter().filter(|(p, t)| p.as_ref() == t.as_ref()).count(),
            length_confusion: length_confusion(&all_pred, &all_true)?,
        })
    }
}
