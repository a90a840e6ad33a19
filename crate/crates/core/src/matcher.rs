//! Word prediction from model outputs.
//!
//! Signature models are matched by cosine similarity against a lexicon of
//! attribute signatures: over unseen words only (ZSL) or over seen and unseen
//! words together (GZSL). The cosine is taken on the raw concatenated
//! `[phoc, phos]` vector, so the PHOS block (counts, larger magnitudes) carries
//! more weight than the binary PHOC block.
//!
//! CTC models have no search space; their decoded string is compared to the
//! truth directly with [`ctc_predict_eval`].

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::math;
use crate::signature::{AttributeSignature, SignatureEncoder, SignatureError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error("prediction vector has zero norm")]
    ZeroVector,
    #[error("the lexicon has no candidate words")]
    EmptyLexicon,
    #[error("prediction has {got} dimensions, signatures have {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("word {0:?} is listed twice")]
    DuplicateWord(String),
    #[error("word {0:?} is both seen and unseen")]
    SeenUnseenOverlap(String),
    #[error("words {0:?} and {1:?} have identical signatures")]
    DuplicateSignature(String, String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

#[derive(Clone, Debug)]
struct Entry {
    signature: AttributeSignature,
    norm: f64,
}

/// Seen and unseen label sets with their signatures.
#[derive(Clone, Debug)]
pub struct Lexicon {
    seen: Vec<Entry>,
    unseen: Vec<Entry>,
    dim: usize,
}

/// Which labels a prediction may choose from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchSpace {
    Seen,
    Unseen,
    All,
}

impl Lexicon {
    /// Encode both word lists and check the lexicon invariants: no duplicates
    /// within a side, disjoint sides, pairwise distinct signatures.
    pub fn build<S: AsRef<str>>(
        seen: &[S],
        unseen: &[S],
        encoder: &SignatureEncoder,
    ) -> Result<Self, MatchError> {
        let mut owner: BTreeMap<&str, bool> = BTreeMap::new();
        for (words, is_seen) in [(seen, true), (unseen, false)] {
            for w in words {
                if let Some(&prev) = owner.get(w.as_ref()) {
                    let w = String::from(w.as_ref());
                    return Err(if prev == is_seen {
                        MatchError::DuplicateWord(w)
                    } else {
                        MatchError::SeenUnseenOverlap(w)
                    });
                }
                owner.insert(w.as_ref(), is_seen);
            }
        }
        let encode = |words: &[S]| -> Result<Vec<Entry>, MatchError> {
            words
                .iter()
                .map(|w| {
                    let signature = encoder.encode(w.as_ref())?;
                    let norm = norm(&signature.combined);
                    Ok(Entry { signature, norm })
                })
                .collect()
        };
        let lexicon = Self {
            seen: encode(seen)?,
            unseen: encode(unseen)?,
            dim: encoder.len(),
        };
        let mut by_bits: BTreeMap<Vec<u32>, &str> = BTreeMap::new();
        for e in lexicon.seen.iter().chain(&lexicon.unseen) {
            let bits = e.signature.combined.iter().map(|v| v.to_bits()).collect();
            if let Some(other) = by_bits.insert(bits, &e.signature.word) {
                return Err(MatchError::DuplicateSignature(
                    String::from(other),
                    e.signature.word.clone(),
                ));
            }
        }
        Ok(lexicon)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seen_words(&self) -> impl Iterator<Item = &str> {
        self.seen.iter().map(|e| e.signature.word.as_str())
    }

    pub fn unseen_words(&self) -> impl Iterator<Item = &str> {
        self.unseen.iter().map(|e| e.signature.word.as_str())
    }

    pub fn seen_len(&self) -> usize {
        self.seen.len()
    }

    pub fn unseen_len(&self) -> usize {
        self.unseen.len()
    }

    /// Signature of a lexicon word, if present.
    pub fn signature(&self, word: &str) -> Option<&AttributeSignature> {
        self.seen
            .iter()
            .chain(&self.unseen)
            .find(|e| e.signature.word == word)
            .map(|e| &e.signature)
    }

    pub fn is_unseen(&self, word: &str) -> bool {
        self.unseen.iter().any(|e| e.signature.word == word)
    }

    /// Highest-cosine word within `space`. Ties go to the lexicographically
    /// smallest word.
    pub fn predict(&self, pred: &[f32], space: SearchSpace) -> Result<&str, MatchError> {
        if pred.len() != self.dim {
            return Err(MatchError::DimensionMismatch {
                expected: self.dim,
                got: pred.len(),
            });
        }
        let pred_norm = norm(pred);
        if pred_norm == 0.0 {
            return Err(MatchError::ZeroVector);
        }
        let candidates: &mut dyn Iterator<Item = &Entry> = match space {
            SearchSpace::Seen => &mut self.seen.iter(),
            SearchSpace::Unseen => &mut self.unseen.iter(),
            SearchSpace::All => &mut self.seen.iter().chain(&self.unseen),
        };
        let mut best: Option<(f64, &str)> = None;
        for e in candidates {
            let dot: f64 = pred
                .iter()
                .zip(&e.signature.combined)
                .map(|(&a, &b)| f64::from(a) * f64::from(b))
                .sum();
            let cos = dot / (pred_norm * e.norm);
            let word = e.signature.word.as_str();
            best = match best {
                Some((bc, bw)) if bc > cos || (bc == cos && bw <= word) => Some((bc, bw)),
                _ => Some((cos, word)),
            };
        }
        best.map(|(_, w)| w).ok_or(MatchError::EmptyLexicon)
    }
}

fn norm(v: &[f32]) -> f64 {
    math::sqrt(v.iter().map(|&x| f64::from(x) * f64::from(x)).sum())
}

/// ZSL prediction: nearest unseen word by cosine similarity.
pub fn zsl_predict<'a>(pred: &[f32], lexicon: &'a Lexicon) -> Result<&'a str, MatchError> {
    lexicon.predict(pred, SearchSpace::Unseen)
}

/// GZSL prediction: nearest word among seen and unseen labels.
pub fn gzsl_predict<'a>(pred: &[f32], lexicon: &'a Lexicon) -> Result<&'a str, MatchError> {
    lexicon.predict(pred, SearchSpace::All)
}

/// CTC output is correct iff it equals the truth exactly.
pub fn ctc_predict_eval(decoded: &str, truth: &str) -> bool {
    decoded == truth
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lexicon() -> Lexicon {
        Lexicon::build(&["the", "of", "and"], &["deep", "keep", "peek"], &SignatureEncoder::default())
            .unwrap()
    }

    #[test]
    fn exact_signature_retrieves_itself() {
        let lex = lexicon();
        for w in ["deep", "keep", "peek"] {
            let sig = lex.signature(w).unwrap().combined.clone();
            assert_eq!(zsl_predict(&sig, &lex).unwrap(), w);
            assert_eq!(gzsl_predict(&sig, &lex).unwrap(), w);
            let scaled: Vec<f32> = sig.iter().map(|v| v * 3.5).collect();
            assert_eq!(zsl_predict(&scaled, &lex).unwrap(), w);
        }
        for w in ["the", "of", "and"] {
            let sig = lex.signature(w).unwrap().combined.clone();
            assert_eq!(gzsl_predict(&sig, &lex).unwrap(), w);
            // ZSL is restricted to unseen words even when a seen word matches.
            assert!(lex.is_unseen(zsl_predict(&sig, &lex).unwrap()));
        }
    }

    #[test]
    fn errors() {
        let lex = lexicon();
        let zero = alloc::vec![0.0f32; lex.dim()];
        assert_eq!(zsl_predict(&zero, &lex), Err(MatchError::ZeroVector));
        assert!(matches!(
            zsl_predict(&[1.0], &lex),
            Err(MatchError::DimensionMismatch { .. })
        ));
        let empty = Lexicon::build::<&str>(&["a"], &[], &SignatureEncoder::default()).unwrap();
        let sig = empty.signature("a").unwrap().combined.clone();
        assert_eq!(zsl_predict(&sig, &empty), Err(MatchError::EmptyLexicon));
        let enc = SignatureEncoder::default();
        assert!(matches!(
            Lexicon::build(&["a", "a"], &["b"], &enc),
            Err(MatchError::DuplicateWord(_))
        ));
        assert!(matches!(
            Lexicon::build(&["a"], &["a"], &enc),
            Err(MatchError::SeenUnseenOverlap(_))
        ));
    }

    #[test]
    fn ctc_exact_match() {
        assert!(ctc_predict_eval("deep", "deep"));
        assert!(!ctc_predict_eval("deep", "keep"));
        assert!(!ctc_predict_eval("", "deep"));
    }
}
