use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use super::SignatureError;

/// Number of primitive shapes tracked per character.
pub const NUM_SHAPES: usize = 11;

/// Primitive shape names, in column order.
pub const SHAPE_NAMES: [&str; NUM_SHAPES] = [
    "ascender",
    "descender",
    "left small semi-circle",
    "right small semi-circle",
    "left large semi-circle",
    "right large semi-circle",
    "circle",
    "vertical line",
    "diagonal line",
    "diagonal line at 135 degrees",
    "horizontal line",
];

/// Index of each primitive shape inside a [`ShapeCounts`] row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(usize)]
pub enum Shape {
    Ascender = 0,
    Descender = 1,
    LeftSmallSemiCircle = 2,
    RightSmallSemiCircle = 3,
    LeftLargeSemiCircle = 4,
    RightLargeSemiCircle = 5,
    Circle = 6,
    VerticalLine = 7,
    DiagonalLine = 8,
    Diagonal135 = 9,
    HorizontalLine = 10,
}

pub type ShapeCounts = [u8; NUM_SHAPES];

const DEFAULT_TABLE: &str = include_str!("../../data/shapes.txt");

/// Per-character primitive-shape counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeTable {
    entries: BTreeMap<char, ShapeCounts>,
}

impl ShapeTable {
    pub fn new(entries: BTreeMap<char, ShapeCounts>) -> Self {
        Self { entries }
    }

    /// The table shipped with the crate, covering `a`..=`z`.
    pub fn default_latin() -> Self {
        Self::parse(DEFAULT_TABLE).expect("bundled shape table is well formed")
    }

    pub fn get(&self, c: char) -> Option<&ShapeCounts> {
        self.entries.get(&c)
    }

    pub fn entries(&self) -> &BTreeMap<char, ShapeCounts> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Parse the text format: one `<char> <11 counts>` line per character,
    /// blank lines and `#` comments ignored.
    pub fn parse(text: &str) -> Result<Self, SignatureError> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let mut fields = content.split_whitespace();
            let Some(key) = fields.next() else { continue };
            let mut chars = key.chars();
            let (Some(c), None) = (chars.next(), chars.next()) else {
                return Err(SignatureError::Parse {
                    line,
                    message: format!("expected a single character, found {key:?}"),
                });
            };
            let mut counts = [0u8; NUM_SHAPES];
            let mut n = 0;
            for field in fields {
                if n == NUM_SHAPES {
                    return Err(SignatureError::Parse {
                        line,
                        message: format!("more than {NUM_SHAPES} counts for {c:?}"),
                    });
                }
                counts[n] = field.parse::<u8>().map_err(|_| SignatureError::Parse {
                    line,
                    message: format!("count {field:?} is not a non-negative integer"),
                })?;
                n += 1;
            }
            if n != NUM_SHAPES {
                return Err(SignatureError::Parse {
                    line,
                    message: format!("expected {NUM_SHAPES} counts for {c:?}, found {n}"),
                });
            }
            if entries.insert(c, counts).is_some() {
                return Err(SignatureError::Parse {
                    line,
                    message: format!("duplicate entry for {c:?}"),
                });
            }
        }
        Ok(Self { entries })
    }

    /// Serialize to the text format accepted by [`ShapeTable::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::from("# asc desc lss rss lls rls circ vert diag d135 hor\n");
        for (c, counts) in &self.entries {
            out.push(*c);
            for v in counts {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }

    /// Check that every character of `alphabet` has an entry.
    pub fn ensure_covers(&self, alphabet: &[char]) -> Result<(), SignatureError> {
        match alphabet.iter().find(|c| !self.entries.contains_key(c)) {
            Some(&c) => Err(SignatureError::MissingCharacter(c)),
            None => Ok(()),
        }
    }
}

impl Default for ShapeTable {
    fn default() -> Self {
        Self::default_latin()
    }
}
