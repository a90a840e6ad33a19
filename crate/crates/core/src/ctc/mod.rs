//! Connectionist temporal classification.
//!
//! Class layout is fixed: the `|Σ|` alphabet symbols come first and the blank
//! is always the last class, index `|Σ|`. Everything here works in `f64`.

mod decode;
mod loss;
mod oracle;
mod prob;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use decode::{beam_search_decode, best_path_decode, Beam, BeamSearchOutput};
pub use loss::{
    ctc_log_prob, ctc_log_prob_indices, ctc_loss_and_grad, ctc_loss_and_grad_indices,
    required_steps, CtcLossResult,
};
pub use oracle::{brute_force_label_posterior, BRUTE_FORCE_LIMIT};
pub use prob::ProbMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CtcError {
    #[error("symbol {0:?} is not in the alphabet")]
    InvalidSymbol(char),
    #[error("class index {0} is out of range")]
    InvalidClass(usize),
    #[error("label needs {required} time steps but only {available} are available")]
    InfeasibleLabel { required: usize, available: usize },
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("invalid probability matrix: {0}")]
    InvalidMatrix(String),
    #[error("brute force over {paths} paths exceeds the limit of {limit}")]
    TooLarge { paths: u128, limit: u128 },
}

/// Output symbols of a CTC model, without the blank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CtcAlphabet {
    symbols: Vec<char>,
}

impl CtcAlphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Result<Self, CtcError> {
        let symbols: Vec<char> = symbols.into_iter().collect();
        for (i, c) in symbols.iter().enumerate() {
            if symbols[..i].contains(c) {
                return Err(CtcError::InvalidAlphabet(alloc::format!("duplicate symbol {c:?}")));
            }
        }
        Ok(Self { symbols })
    }

    /// `a`..=`z`.
    pub fn latin_lowercase() -> Self {
        Self { symbols: ('a'..='z').collect() }
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn blank_index(&self) -> usize {
        self.symbols.len()
    }

    /// Number of output classes, blank included.
    pub fn num_classes(&self) -> usize {
        self.symbols.len() + 1
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.symbols.iter().position(|&s| s == c)
    }

    pub fn encode(&self, text: &str) -> Result<Vec<usize>, CtcError> {
        text.chars()
            .map(|c| self.index_of(c).ok_or(CtcError::InvalidSymbol(c)))
            .collect()
    }

    /// Map non-blank class indices back to text.
    pub fn decode(&self, indices: &[usize]) -> Result<String, CtcError> {
        indices
            .iter()
            .map(|&i| self.symbols.get(i).copied().ok_or(CtcError::InvalidClass(i)))
            .collect()
    }

    pub fn as_string(&self) -> String {
        self.symbols.iter().collect()
    }
}

/// Merge consecutive repeats, then drop blanks.
pub fn collapse(path: &[usize], blank: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut prev = None;
    for &k in path {
        if Some(k) != prev && k != blank {
            out.push(k);
        }
        prev = Some(k);
    }
    out
}

/// [`collapse`] over text, with `blank` standing for the blank class.
pub fn collapse_str(path: &str, alphabet: &CtcAlphabet, blank: char) -> Result<String, CtcError> {
    if alphabet.index_of(blank).is_some() {
        return Err(CtcError::InvalidAlphabet(alloc::format!(
            "blank marker {blank:?} is also an alphabet symbol"
        )));
    }
    let indices = path
        .chars()
        .map(|c| {
            if c == blank {
                Ok(alphabet.blank_index())
            } else {
                alphabet.index_of(c).ok_or(CtcError::InvalidSymbol(c))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    alphabet.decode(&collapse(&indices, alphabet.blank_index()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> CtcAlphabet {
        CtcAlphabet::new(['A', 'B']).unwrap()
    }

    #[test]
    fn collapse_examples() {
        assert_eq!(collapse_str("AAAB", &ab(), '-').unwrap(), "AB");
        assert_eq!(collapse_str("AA-AB", &ab(), '-').unwrap(), "AAB");
        assert_eq!(collapse_str("", &ab(), '-').unwrap(), "");
        assert_eq!(collapse_str("--", &ab(), '-').unwrap(), "");
    }

    #[test]
    fn collapse_rejects_unknown_symbols() {
        assert_eq!(collapse_str("AC", &ab(), '-'), Err(CtcError::InvalidSymbol('C')));
    }

    #[test]
    fn alphabet_layout() {
        let a = CtcAlphabet::latin_lowercase();
        assert_eq!(a.blank_index(), 26);
        assert_eq!(a.num_classes(), 27);
        assert_eq!(a.encode("az").unwrap(), [0, 25]);
        assert_eq!(a.decode(&[7, 8]).unwrap(), "hi");
        assert!(CtcAlphabet::new(['a', 'a']).is_err());
    }
}
