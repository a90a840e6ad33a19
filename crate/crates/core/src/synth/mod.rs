//! Synthetic word-image corpora: procedural stroke glyphs, augmentation and
//! seen/unseen split planning.

mod augment;
mod corpus;
pub mod glyphs;
mod render;

use alloc::string::String;

use thiserror::Error;

pub use augment::{augment, MAX_SHEAR_DEGREES};
pub use corpus::{
    audit_manifest, default_word_list, manifest_rows, parse_word_list, plan_corpus, AuditReport, CorpusConfig,
    ManifestRow, Partition, PlannedImage, DEFAULT_WORDS,
};
pub use render::{render_word, Style, BASELINE_ROW, MAX_WORD_LEN};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SynthError {
    #[error("empty word")]
    EmptyWord,
    #[error("word {word:?} has {len} characters, at most {max} can be rendered")]
    WordTooLong { word: String, len: usize, max: usize },
    #[error("no glyph for character {0:?}")]
    UnknownCharacter(char),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("word list has {available} words, {needed} are required")]
    InsufficientWords { needed: usize, available: usize },
    #[error("invalid word list: {0}")]
    WordList(String),
    #[error("label leakage: {0}")]
    LabelLeak(String),
    #[error("manifest audit failed: {0}")]
    Audit(String),
}
