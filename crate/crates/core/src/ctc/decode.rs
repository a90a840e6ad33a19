use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::num::NonZeroUsize;

use crate::math;

use super::{collapse, CtcAlphabet, CtcError, ProbMatrix};

/// Collapse of the per-step argmax path. Ties go to the lowest class index.
pub fn best_path_decode(probs: &ProbMatrix, alphabet: &CtcAlphabet) -> Result<String, CtcError> {
    check_cols(probs, alphabet)?;
    let path: Vec<usize> = (0..probs.rows())
        .map(|t| {
            let row = probs.row(t);
            let mut best = 0;
            for (k, &p) in row.iter().enumerate().skip(1) {
                if p > row[best] {
                    best = k;
                }
            }
            best
        })
        .collect();
    alphabet.decode(&collapse(&path, probs.blank()))
}

/// One entry of the final beam list.
#[derive(Clone, Debug, PartialEq)]
pub struct Beam {
    pub text: String,
    /// Log of the probability mass the search accumulated for this prefix.
    pub log_prob: f64,
}

impl Beam {
    pub fn probability(&self) -> f64 {
        math::exp(self.log_prob)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BeamSearchOutput {
    /// Highest scoring labelling.
    pub best: String,
    /// Retained beams, best first.
    pub beams: Vec<Beam>,
}

#[derive(Clone, Copy)]
struct Mass {
    blank: f64,
    non_blank: f64,
}

impl Mass {
    const ZERO: Mass = Mass {
        blank: f64::NEG_INFINITY,
        non_blank: f64::NEG_INFINITY,
    };

    fn total(self) -> f64 {
        lse(self.blank, self.non_blank)
    }
}

use crate::math::log_sum_exp as lse;

/// Prefix beam search.
///
/// Each prefix keeps separate log masses for paths ending in a blank and paths
/// ending in its last symbol, so that paths collapsing to the same prefix are
/// merged. After every step only the `beam_width` prefixes with the highest
/// total mass survive (ties: lexicographically smaller class sequence first).
/// With a beam at least as wide as the number of reachable prefixes nothing is
/// pruned and the scores are the exact label posteriors.
pub fn beam_search_decode(
    probs: &ProbMatrix,
    alphabet: &CtcAlphabet,
    beam_width: NonZeroUsize,
) -> Result<BeamSearchOutput, CtcError> {
    check_cols(probs, alphabet)?;
    let blank = probs.blank();
    let log_probs = probs.log_data();
    let classes = probs.cols();

    let mut beams: Vec<(Vec<usize>, Mass)> = vec![(
        Vec::new(),
        Mass {
            blank: 0.0,
            non_blank: f64::NEG_INFINITY,
        },
    )];

    for t in 0..probs.rows() {
        let lp = &log_probs[t * classes..(t + 1) * classes];
        let mut next: BTreeMap<Vec<usize>, Mass> = BTreeMap::new();
        for (prefix, mass) in &beams {
            let total = mass.total();
            let stay = next.entry(prefix.clone()).or_insert(Mass::ZERO);
            stay.blank = lse(stay.blank, total + lp[blank]);
            let last = prefix.last().copied();
            if let Some(last) = last {
                // Repeating the last symbol without a blank keeps the prefix.
                stay.non_blank = lse(stay.non_blank, mass.non_blank + lp[last]);
            }
            for (k, &lp_k) in lp.iter().enumerate().take(blank) {
                let mut extended = prefix.clone();
                extended.push(k);
                let source = if Some(k) == last { mass.blank } else { total };
                let entry = next.entry(extended).or_insert(Mass::ZERO);
                entry.non_blank = lse(entry.non_blank, source + lp_k);
            }
        }
        beams = next.into_iter().collect();
        beams.sort_by(|a, b| rank(&a.0, a.1.total(), &b.0, b.1.total()));
        beams.truncate(beam_width.get());
    }

    let beams = beams
        .into_iter()
        .map(|(prefix, mass)| {
            Ok(Beam {
                text: alphabet.decode(&prefix)?,
                log_prob: mass.total(),
            })
        })
        .collect::<Result<Vec<_>, CtcError>>()?;
    Ok(BeamSearchOutput {
        best: beams[0].text.clone(),
        beams,
    })
}

fn rank(pa: &[usize], sa: f64, pb: &[usize], sb: f64) -> Ordering {
    sb.partial_cmp(&sa).unwrap_or(Ordering::Equal).then_with(|| pa.cmp(pb))
}

fn check_cols(probs: &ProbMatrix, alphabet: &CtcAlphabet) -> Result<(), CtcError> {
    if probs.cols() != alphabet.num_classes() {
        return Err(CtcError::InvalidMatrix(alloc::format!(
            "matrix has {} columns, alphabet needs {}",
            probs.cols(),
            alphabet.num_classes()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ctc::ctc_log_prob;

    fn one_hot(path: &[usize], classes: usize) -> ProbMatrix {
        let mut data = vec![0.0; path.len() * classes];
        for (t, &k) in path.iter().enumerate() {
            data[t * classes + k] = 1.0;
        }
        ProbMatrix::new(path.len(), classes, data).unwrap()
    }

    fn nz(k: usize) -> NonZeroUsize {
        NonZeroUsize::new(k).unwrap()
    }

    #[test]
    fn best_path_on_one_hot() {
        let ab = CtcAlphabet::new(['A', 'B']).unwrap();
        // A A - A B
        let m = one_hot(&[0, 0, 2, 0, 1], 3);
        assert_eq!(best_path_decode(&m, &ab).unwrap(), "AAB");
        assert_eq!(best_path_decode(&one_hot(&[2, 2], 3), &ab).unwrap(), "");
        assert_eq!(best_path_decode(&one_hot(&[0], 3), &ab).unwrap(), "A");
    }

    #[test]
    fn best_path_ties_take_lowest_index() {
        let ab = CtcAlphabet::new(['A', 'B']).unwrap();
        let m = ProbMatrix::new(1, 3, vec![0.4, 0.4, 0.2]).unwrap();
        assert_eq!(best_path_decode(&m, &ab).unwrap(), "A");
    }

    #[test]
    fn beam_on_one_hot_matches_collapse() {
        let ab = CtcAlphabet::new(['A', 'B']).unwrap();
        let m = one_hot(&[0, 0, 2, 0, 1], 3);
        for k in [1, 2, 5, 50] {
            let out = beam_search_decode(&m, &ab, nz(k)).unwrap();
            assert_eq!(out.best, "AAB");
            assert!((out.beams[0].probability() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn beam_prefers_merged_mass_over_best_path() {
        // Best path is "-" (empty) at every step, but "a" wins once the
        // alignments are summed.
        let a = CtcAlphabet::new(['a']).unwrap();
        let m = ProbMatrix::new(2, 2, vec![0.4, 0.6, 0.4, 0.6]).unwrap();
        assert_eq!(best_path_decode(&m, &a).unwrap(), "");
        let out = beam_search_decode(&m, &a, nz(4)).unwrap();
        assert_eq!(out.best, "a");
        let exact = ctc_log_prob(&m, "a", &a).unwrap();
        assert!((out.beams[0].log_prob - exact).abs() < 1e-12);
    }

    #[test]
    fn empty_matrix_yields_empty_string() {
        let a = CtcAlphabet::new(['a']).unwrap();
        let m = ProbMatrix::new(0, 2, vec![]).unwrap();
        let out = beam_search_decode(&m, &a, nz(3)).unwrap();
        assert_eq!(out.best, "");
        assert_eq!(out.beams[0].log_prob, 0.0);
    }
}
