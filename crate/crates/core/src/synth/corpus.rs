use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{augment, render_word, SynthError, MAX_WORD_LEN};
use crate::image::WordImage;
use crate::rng;

/// Frequency-ordered common English words shipped with the crate.
pub const DEFAULT_WORDS: &str = include_str!("../../data/words.txt");

/// Parses a word list: one word per line, `#` comments and blank lines ignored.
pub fn parse_word_list(text: &str) -> Result<Vec<String>, SynthError> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(ch) = line.chars().find(|c| !c.is_ascii_lowercase()) {
            return Err(SynthError::WordList(format!("line {}: character {ch:?} in {line:?}", i + 1)));
        }
        if line.len() > MAX_WORD_LEN {
            return Err(SynthError::WordList(format!("line {}: {line:?} is longer than {MAX_WORD_LEN}", i + 1)));
        }
        if !seen.insert(line) {
            return Err(SynthError::WordList(format!("line {}: duplicate word {line:?}", i + 1)));
        }
        out.push(line.to_string());
    }
    Ok(out)
}

pub fn default_word_list() -> Vec<String> {
    parse_word_list(DEFAULT_WORDS).expect("shipped word list is valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Partition {
    Train,
    Val,
    TestSeen,
    TestUnseen,
}

impl Partition {
    pub const ALL: [Partition; 4] = [Partition::Train, Partition::Val, Partition::TestSeen, Partition::TestUnseen];

    pub fn as_str(self) -> &'static str {
        match self {
            Partition::Train => "train",
            Partition::Val => "val",
            Partition::TestSeen => "test_seen",
            Partition::TestUnseen => "test_unseen",
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Partition {
    type Err = SynthError;

    fn from_str(s: &str) -> Result<Self, SynthError> {
        Partition::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| SynthError::Audit(format!("unknown partition {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub n_seen: usize,
    pub n_unseen: usize,
    pub styles: u32,
    /// Training images per seen word; the other partitions follow the MFU
    /// proportions train:val:test_seen:test_unseen = 36000:3600:4000:8000.
    pub copies_per_word: usize,
    pub max_shear_degrees: f64,
    pub max_noise_sigma: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            n_seen: 200,
            n_unseen: 50,
            styles: 2,
            copies_per_word: 12,
            max_shear_degrees: 10.0,
            max_noise_sigma: 8.0,
        }
    }
}

impl CorpusConfig {
    /// Image counts for train, val, test_seen and test_unseen.
    pub fn partition_sizes(&self) -> [usize; 4] {
        let train = self.n_seen * self.copies_per_word;
        let scaled = |num: usize| (train * num + 18_000) / 36_000;
        [train, scaled(3_600), scaled(4_000), scaled(8_000)]
    }
}

/// Everything needed to reproduce one corpus image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannedImage {
    pub index: usize,
    pub word: String,
    pub partition: Partition,
    pub style_id: u32,
    pub shear_degrees: f64,
    pub noise_sigma: f64,
    pub noise_seed: u64,
}

impl PlannedImage {
    /// Relative path used in manifests.
    pub fn path(&self) -> String {
        format!("{}/{:05}_{}.pgm", self.partition, self.index, self.word)
    }

    pub fn realize(&self) -> Result<WordImage, SynthError> {
        let mut img = render_word(&self.word, self.style_id)?;
        img.image = augment(&img.image, self.shear_degrees, self.noise_sigma, self.noise_seed)?;
        Ok(img)
    }
}

/// Assigns the first `n_seen` words to the seen set and the next `n_unseen`
/// to the unseen set, then lays out every image of the corpus.
pub fn plan_corpus(words: &[String], cfg: &CorpusConfig, seed: u64) -> Result<Vec<PlannedImage>, SynthError> {
    let needed = cfg.n_seen + cfg.n_unseen;
    if words.len() < needed {
        return Err(SynthError::InsufficientWords {
            needed,
            available: words.len(),
        });
    }
    if cfg.n_seen == 0 || cfg.n_unseen == 0 || cfg.styles == 0 || cfg.copies_per_word == 0 {
        return Err(SynthError::OutOfRange("corpus sizes must be positive".into()));
    }
    if !(0.0..=super::augment::MAX_SHEAR_DEGREES).contains(&cfg.max_shear_degrees)
        || !(cfg.max_noise_sigma >= 0.0 && cfg.max_noise_sigma.is_finite())
    {
        return Err(SynthError::OutOfRange("augmentation bounds".into()));
    }
    let unique: BTreeSet<&String> = words[..needed].iter().collect();
    if unique.len() != needed {
        return Err(SynthError::WordList("duplicate words among the selected classes".into()));
    }
    let seen = &words[..cfg.n_seen];
    let unseen = &words[cfg.n_seen..needed];
    let [_, val, test_seen, test_unseen] = cfg.partition_sizes();
    let styles = cfg.styles;

    let mut jobs: Vec<(&String, Partition, u32)> = Vec::new();
    for w in seen {
        for c in 0..cfg.copies_per_word {
            jobs.push((w, Partition::Train, c as u32 % styles));
        }
    }
    // Held-out partitions cycle over their words; styles rotate per pass so
    // repeated draws of a word use different styles.
    for (partition, pool, count) in [
        (Partition::Val, seen, val),
        (Partition::TestSeen, seen, test_seen),
        (Partition::TestUnseen, unseen, test_unseen),
    ] {
        for k in 0..count {
            let pass = k / pool.len();
            jobs.push((&pool[k % pool.len()], partition, (k + pass) as u32 % styles));
        }
    }

    let mut plan = Vec::with_capacity(jobs.len());
    for (index, (word, partition, style_id)) in jobs.into_iter().enumerate() {
        let mut r = rng::stream(seed, "augment", index as u64);
        let shear = if cfg.max_shear_degrees > 0.0 {
            r.random_range(-cfg.max_shear_degrees..=cfg.max_shear_degrees)
        } else {
            0.0
        };
        let sigma = if cfg.max_noise_sigma > 0.0 { r.random_range(0.0..=cfg.max_noise_sigma) } else { 0.0 };
        plan.push(PlannedImage {
            index,
            word: word.clone(),
            partition,
            style_id,
            shear_degrees: shear,
            noise_sigma: sigma,
            noise_seed: r.next_u64(),
        });
    }
    Ok(plan)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub path: String,
    pub label: String,
    pub partition: Partition,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub images: BTreeMap<Partition, usize>,
    pub classes: BTreeMap<Partition, usize>,
}

/// Checks the split invariants: unseen labels never occur in train, val or
/// test_seen, and every test_seen label occurs in train.
pub fn audit_manifest(rows: &[ManifestRow]) -> Result<AuditReport, SynthError> {
    let mut labels: BTreeMap<Partition, BTreeSet<&str>> = BTreeMap::new();
    let mut report = AuditReport::default();
    let mut paths = BTreeSet::new();
    for row in rows {
        if !paths.insert(row.path.as_str()) {
            return Err(SynthError::Audit(format!("path {} listed twice", row.path)));
        }
        labels.entry(row.partition).or_default().insert(&row.label);
        *report.images.entry(row.partition).or_default() += 1;
    }
    let empty = BTreeSet::new();
    let get = |p: Partition| labels.get(&p).unwrap_or(&empty);
    for p in [Partition::Train, Partition::Val, Partition::TestSeen] {
        if let Some(leak) = get(Partition::TestUnseen).intersection(get(p)).next() {
            return Err(SynthError::LabelLeak(format!("unseen label {leak:?} appears in {p}")));
        }
    }
    if let Some(missing) = get(Partition::TestSeen).difference(get(Partition::Train)).next() {
        return Err(SynthError::Audit(format!("test_seen label {missing:?} has no training image")));
    }
    for (p, set) in &labels {
        report.classes.insert(*p, set.len());
    }
    Ok(report)
}

pub fn manifest_rows(plan: &[PlannedImage]) -> Vec<ManifestRow> {
    plan.iter()
        .map(|p| ManifestRow {
            path: p.path(),
            label: p.word.clone(),
            partition: p.partition,
        })
        .collect()
}
