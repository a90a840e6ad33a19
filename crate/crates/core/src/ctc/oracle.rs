use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;

use super::{collapse, CtcAlphabet, CtcError, ProbMatrix};

/// Largest number of paths [`brute_force_label_posterior`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u128 = 1_000_000;

/// Exact label posterior by enumerating every path through `probs`.
///
/// Labels longer than `max_len` are dropped from the result. This is a test
/// oracle: cost is `(|Σ|+1)^T`.
pub fn brute_force_label_posterior(
    probs: &ProbMatrix,
    alphabet: &CtcAlphabet,
    max_len: usize,
) -> Result<BTreeMap<String, f64>, CtcError> {
    let classes = probs.cols();
    if classes != alphabet.num_classes() {
        return Err(CtcError::InvalidMatrix(alloc::format!(
            "matrix has {classes} columns, alphabet needs {}",
            alphabet.num_classes()
        )));
    }
    let steps = probs.rows();
    let paths = (classes as u128).checked_pow(steps as u32).unwrap_or(u128::MAX);
    if paths > BRUTE_FORCE_LIMIT {
        return Err(CtcError::TooLarge { paths, limit: BRUTE_FORCE_LIMIT });
    }

    let mut posterior = BTreeMap::new();
    let mut path = vec![0usize; steps];
    loop {
        let p: f64 = path.iter().enumerate().map(|(t, &k)| probs.get(t, k)).product();
        let label = collapse(&path, probs.blank());
        if label.len() <= max_len {
            *posterior.entry(alphabet.decode(&label)?).or_insert(0.0) += p;
        }
        // Odometer increment; the last step varies fastest.
        let mut t = steps;
        loop {
            if t == 0 {
                return Ok(posterior);
            }
            t -= 1;
            path[t] += 1;
            if path[t] < classes {
                break;
            }
            path[t] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_single_step() {
        let a = CtcAlphabet::new(['a']).unwrap();
        let m = ProbMatrix::new(1, 2, vec![0.5, 0.5]).unwrap();
        let post = brute_force_label_posterior(&m, &a, 1).unwrap();
        assert_eq!(post.len(), 2);
        assert_eq!(post[""], 0.5);
        assert_eq!(post["a"], 0.5);
    }

    #[test]
    fn guard_rejects_large_inputs() {
        let a = CtcAlphabet::new(['a', 'b', 'c']).unwrap();
        let m = ProbMatrix::new(11, 4, vec![0.25; 44]).unwrap();
        assert!(matches!(
            brute_force_label_posterior(&m, &a, 11),
            Err(CtcError::TooLarge { .. })
        ));
    }

    #[test]
    fn max_len_filters_labels() {
        let a = CtcAlphabet::new(['a', 'b']).unwrap();
        let m = ProbMatrix::new(3, 3, vec![1.0 / 3.0; 9]).unwrap();
        let post = brute_force_label_posterior(&m, &a, 1).unwrap();
        assert!(post.keys().all(|k| k.len() <= 1));
        let all = brute_force_label_posterior(&m, &a, 3).unwrap();
        assert!((all.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
