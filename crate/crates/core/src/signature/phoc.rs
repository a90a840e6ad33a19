use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{validate_levels, SignatureError};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhocConfig {
    pub levels: Vec<usize>,
    pub alphabet: Vec<char>,
    /// Minimum overlap between a character interval and a region, as a
    /// fraction of the character interval, for the bit to be set.
    pub occupancy_threshold: f64,
}

impl Default for PhocConfig {
    fn default() -> Self {
        Self {
            levels: vec![2, 3, 4, 5],
            alphabet: ('a'..='z').collect(),
            occupancy_threshold: 0.5,
        }
    }
}

impl PhocConfig {
    pub fn len(&self) -> usize {
        self.levels.iter().sum::<usize>() * self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<(), SignatureError> {
        validate_levels(&self.levels, "PHOC")?;
        if !(self.occupancy_threshold > 0.0 && self.occupancy_threshold <= 1.0) {
            return Err(SignatureError::InvalidConfig(alloc::format!(
                "occupancy threshold must be in (0, 1], got {}",
                self.occupancy_threshold
            )));
        }
        if self.alphabet.is_empty() {
            return Err(SignatureError::InvalidConfig("empty alphabet".into()));
        }
        for (i, c) in self.alphabet.iter().enumerate() {
            if self.alphabet[..i].contains(c) {
                return Err(SignatureError::InvalidConfig(alloc::format!(
                    "duplicate alphabet symbol {c:?}"
                )));
            }
        }
        Ok(())
    }

    fn index_of(&self, c: char) -> Option<usize> {
        self.alphabet.iter().position(|&a| a == c)
    }
}

/// Pyramidal histogram of characters for `word` (0/1 entries).
pub fn phoc_encode(word: &str, cfg: &PhocConfig) -> Result<Vec<f32>, SignatureError> {
    if word.is_empty() {
        return Err(SignatureError::EmptyWord);
    }
    let indices = word
        .chars()
        .map(|ch| {
            cfg.index_of(ch).ok_or_else(|| SignatureError::UnknownCharacter {
                word: String::from(word),
                ch,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = indices.len();
    let sigma = cfg.alphabet.len();
    let mut out = vec![0.0f32; cfg.len()];
    let mut offset = 0;
    for &level in &cfg.levels {
        // Character i spans [i/n, (i+1)/n], region r spans [r/h, (r+1)/h].
        // Scaled by n*h both become integer intervals; the overlap must reach
        // threshold * (1/n), i.e. threshold * h in scaled units.
        let needed = cfg.occupancy_threshold * level as f64;
        for (i, &c) in indices.iter().enumerate() {
            let (lo, hi) = (i * level, (i + 1) * level);
            for r in 0..level {
                let (rlo, rhi) = (r * n, (r + 1) * n);
                let overlap = hi.min(rhi).saturating_sub(lo.max(rlo));
                if overlap > 0 && overlap as f64 >= needed {
                    out[offset + r * sigma + c] = 1.0;
                }
            }
        }
        offset += level * sigma;
    }
    Ok(out)
}
