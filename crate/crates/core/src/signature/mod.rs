//! Attribute signatures: PHOC, PHOS and their concatenation.
//!
//! Both encodings are pyramids: at level `h` a word is divided into `h` equal
//! parts and a histogram is recorded per part. PHOC marks which characters
//! occupy a region, PHOS counts primitive stroke shapes per segment.

mod phoc;
mod phos;
mod shape_table;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use phoc::{phoc_encode, PhocConfig};
pub use phos::{phos_encode, segment_of, PhosConfig};
pub use shape_table::{Shape, ShapeCounts, ShapeTable, NUM_SHAPES, SHAPE_NAMES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("empty word")]
    EmptyWord,
    #[error("word {word:?} contains unknown character {ch:?}")]
    UnknownCharacter { word: String, ch: char },
    #[error("shape table has no entry for {0:?}")]
    MissingCharacter(char),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Word label embedding `[phoc, phos]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttributeSignature {
    pub word: String,
    pub phoc: Vec<f32>,
    pub phos: Vec<f32>,
    pub combined: Vec<f32>,
}

impl AttributeSignature {
    pub fn len(&self) -> usize {
        self.combined.len()
    }

    pub fn is_empty(&self) -> bool {
        self.combined.is_empty()
    }
}

/// Encode `word` into its concatenated Pho(SC) signature.
pub fn phosc_encode(
    word: &str,
    phos_cfg: &PhosConfig,
    phoc_cfg: &PhocConfig,
) -> Result<AttributeSignature, SignatureError> {
    let phoc = phoc_encode(word, phoc_cfg)?;
    let phos = phos_encode(word, phos_cfg)?;
    let mut combined = Vec::with_capacity(phoc.len() + phos.len());
    combined.extend_from_slice(&phoc);
    combined.extend_from_slice(&phos);
    Ok(AttributeSignature {
        word: String::from(word),
        phoc,
        phos,
        combined,
    })
}

/// PHOS and PHOC configuration bundled together.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct SignatureEncoder {
    pub phos: PhosConfig,
    pub phoc: PhocConfig,
}

impl SignatureEncoder {
    pub fn new(phos: PhosConfig, phoc: PhocConfig) -> Result<Self, SignatureError> {
        phos.validate()?;
        phoc.validate()?;
        Ok(Self { phos, phoc })
    }

    pub fn encode(&self, word: &str) -> Result<AttributeSignature, SignatureError> {
        phosc_encode(word, &self.phos, &self.phoc)
    }

    pub fn phoc_len(&self) -> usize {
        self.phoc.len()
    }

    pub fn phos_len(&self) -> usize {
        self.phos.len()
    }

    pub fn len(&self) -> usize {
        self.phoc_len() + self.phos_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub(crate) fn validate_levels(levels: &[usize], what: &str) -> Result<(), SignatureError> {
    if levels.is_empty() {
        return Err(SignatureError::InvalidConfig(alloc::format!("{what} levels are empty")));
    }
    if levels[0] == 0 || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SignatureError::InvalidConfig(alloc::format!(
            "{what} levels must be positive and strictly increasing, got {levels:?}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    #[test]
    fn default_lengths() {
        let enc = SignatureEncoder::default();
        assert_eq!(enc.phos_len(), 165);
        assert_eq!(enc.phoc_len(), 364);
        let sig = enc.encode("listen").unwrap();
        assert_eq!(sig.len(), 529);
        assert_eq!(sig.combined[..364], sig.phoc[..]);
        assert_eq!(sig.combined[364..], sig.phos[..]);
    }

    #[test]
    fn single_letter_signature_is_binary_and_integral() {
        let sig = SignatureEncoder::default().encode("a").unwrap();
        assert!(sig.phoc.iter().all(|&v| v == 0.0 || v == 1.0));
        assert!(sig.phos.iter().all(|&v| v >= 0.0 && v.fract() == 0.0));
        assert!(sig.combined.iter().any(|&v| v != 0.0));
    }

    #[test]
    fn single_letter_signatures_are_distinct() {
        let enc = SignatureEncoder::default();
        let sigs: Vec<_> = ('a'..='z')
            .map(|c| enc.encode(&format!("{c}")).unwrap())
            .collect();
        for i in 0..sigs.len() {
            for j in i + 1..sigs.len() {
                assert_ne!(sigs[i].combined, sigs[j].combined, "{} vs {}", sigs[i].word, sigs[j].word);
            }
        }
    }

    #[test]
    fn errors_propagate() {
        let enc = SignatureEncoder::default();
        assert_eq!(enc.encode(""), Err(SignatureError::EmptyWord));
        assert_eq!(
            enc.encode("Word"),
            Err(SignatureError::UnknownCharacter { word: "Word".into(), ch: 'W' })
        );
    }

    #[test]
    fn invalid_levels_rejected() {
        assert!(validate_levels(&[], "x").is_err());
        assert!(validate_levels(&[0, 1], "x").is_err());
        assert!(validate_levels(&[2, 2], "x").is_err());
        assert!(validate_levels(&[1, 3], "x").is_ok());
    }
}
