use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{validate_levels, ShapeTable, SignatureError, NUM_SHAPES};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhosConfig {
    pub levels: Vec<usize>,
    pub shape_table: ShapeTable,
}

impl Default for PhosConfig {
    fn default() -> Self {
        Self {
            levels: vec![1, 2, 3, 4, 5],
            shape_table: ShapeTable::default_latin(),
        }
    }
}

impl PhosConfig {
    /// Output length: `(sum of levels) * 11`.
    pub fn len(&self) -> usize {
        self.levels.iter().sum::<usize>() * NUM_SHAPES
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<(), SignatureError> {
        validate_levels(&self.levels, "PHOS")
    }
}

/// Segment (0-based) of character `index` in a word of `len` characters when
/// split into `level` parts. The character's midpoint decides; for "listen"
/// this gives `lis|ten` at level 2 and `li|st|en` at level 3.
pub fn segment_of(index: usize, len: usize, level: usize) -> usize {
    // floor(((i + 1/2) / n) * h) in exact integer arithmetic.
    ((2 * index + 1) * level / (2 * len)).min(level - 1)
}

/// Pyramidal histogram of shapes for `word`.
pub fn phos_encode(word: &str, cfg: &PhosConfig) -> Result<Vec<f32>, SignatureError> {
    let rows = shape_rows(word, &cfg.shape_table)?;
    let n = rows.len();
    let mut out = vec![0.0f32; cfg.len()];
    let mut offset = 0;
    for &level in &cfg.levels {
        for (i, counts) in rows.iter().enumerate() {
            let base = offset + segment_of(i, n, level) * NUM_SHAPES;
            for (slot, &v) in out[base..base + NUM_SHAPES].iter_mut().zip(counts.iter()) {
                *slot += f32::from(v);
            }
        }
        offset += level * NUM_SHAPES;
    }
    Ok(out)
}

fn shape_rows<'a>(
    word: &str,
    table: &'a ShapeTable,
) -> Result<Vec<&'a [u8; NUM_SHAPES]>, SignatureError> {
    if word.is_empty() {
        return Err(SignatureError::EmptyWord);
    }
    word.chars()
        .map(|ch| {
            table.get(ch).ok_or_else(|| SignatureError::UnknownCharacter {
                word: String::from(word),
                ch,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;

    fn split(word: &str, level: usize) -> Vec<String> {
        let n = word.chars().count();
        let mut parts = vec![String::new(); level];
        for (i, c) in word.chars().enumerate() {
            parts[segment_of(i, n, level)].push(c);
        }
        parts
    }

    #[test]
    fn listen_silent_segmentation() {
        assert_eq!(split("listen", 1), ["listen"]);
        assert_eq!(split("listen", 2), ["lis", "ten"]);
        assert_eq!(split("listen", 3), ["li", "st", "en"]);
        assert_eq!(split("silent", 2), ["sil", "ent"]);
        assert_eq!(split("silent", 3), ["si", "le", "nt"]);
    }

    #[test]
    fn short_words_leave_empty_segments() {
        assert_eq!(split("ab", 5), ["", "a", "", "b", ""]);
        assert_eq!(split("a", 3), ["", "a", ""]);
    }

    #[test]
    fn default_length_is_165() {
        let cfg = PhosConfig::default();
        assert_eq!(phos_encode("listen", &cfg).unwrap().len(), 165);
        assert_eq!(phos_encode("a", &cfg).unwrap().len(), 165);
    }

    #[test]
    fn anagram_level_one_blocks_match_but_vectors_differ() {
        let cfg = PhosConfig::default();
        let a = phos_encode("listen", &cfg).unwrap();
        let b = phos_encode("silent", &cfg).unwrap();
        assert_eq!(a[..NUM_SHAPES], b[..NUM_SHAPES]);
        assert_ne!(a, b);
    }

    #[test]
    fn level_one_block_is_the_word_total() {
        let cfg = PhosConfig::default();
        let v = phos_encode("listen", &cfg).unwrap();
        let mut expected = [0.0f32; NUM_SHAPES];
        for c in "listen".chars() {
            for (e, &x) in expected.iter_mut().zip(cfg.shape_table.get(c).unwrap()) {
                *e += f32::from(x);
            }
        }
        assert_eq!(v[..NUM_SHAPES], expected);
    }

    #[test]
    fn rejects_bad_words() {
        let cfg = PhosConfig::default();
        assert_eq!(phos_encode("", &cfg), Err(SignatureError::EmptyWord));
        assert!(matches!(
            phos_encode("ab1", &cfg),
            Err(SignatureError::UnknownCharacter { ch: '1', .. })
        ));
    }
}
