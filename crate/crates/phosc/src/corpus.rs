//! Corpus generation to disk and loading back through the manifest.

use std::path::{Path, PathBuf};

use phosc_core::model::Sample;
use phosc_core::synth::{audit_manifest, manifest_rows, plan_corpus, CorpusConfig, ManifestRow, Partition};

use crate::error::{PhoscError, Result};
use crate::formats::{manifest, pgm};

pub const MANIFEST_FILE: &str = "manifest.tsv";

/// Renders every planned image under `out_dir` and writes the manifest after
/// the split audit passes. Returns the manifest rows.
pub fn build_corpus(words: &[String], cfg: &CorpusConfig, seed: u64, out_dir: &Path) -> Result<Vec<ManifestRow>> {
    let plan = plan_corpus(words, cfg, seed)?;
    let rows = manifest_rows(&plan);
    audit_manifest(&rows)?;
    for p in &plan {
        pgm::write(&out_dir.join(p.path()), &p.realize()?.image)?;
    }
    manifest::write(&out_dir.join(MANIFEST_FILE), &rows)?;
    Ok(rows)
}

/// A manifest plus the directory its paths are relative to.
#[derive(Clone, Debug)]
pub struct Corpus {
    pub dir: PathBuf,
    pub rows: Vec<ManifestRow>,
}

impl Corpus {
    /// Opens `dir/manifest.tsv` and audits it.
    pub fn open(dir: &Path) -> Result<Self> {
        let rows = manifest::read(&dir.join(MANIFEST_FILE))?;
        audit_manifest(&rows)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            rows,
        })
    }

    pub fn rows(&self, partition: Partition) -> impl Iterator<Item = &ManifestRow> {
        self.rows.iter().filter(move |r| r.partition == partition)
    }

    /// Distinct labels of a partition in manifest order.
    pub fn labels(&self, partition: Partition) -> Vec<String> {
        let mut seen = std::collections::BTreeSet::new();
        self.rows(partition)
            .filter(|r| seen.insert(r.label.as_str()))
            .map(|r| r.label.clone())
            .collect()
    }

    /// Loads every image of a partition; an empty partition is an error.
    pub fn samples(&self, partition: Partition) -> Result<Vec<Sample>> {
        let out = self
            .rows(partition)
            .map(|r| {
                Ok(Sample {
                    image: pgm::read(&self.dir.join(&r.path))?,
                    label: r.label.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if out.is_empty() {
            return Err(PhoscError::MissingPartition(partition));
        }
        Ok(out)
    }
}
