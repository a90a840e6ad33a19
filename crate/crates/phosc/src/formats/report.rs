//! Evaluation reports: JSON with every metric, plus a TSV table with one
//! row per split and `A_u`, `A_s`, `h` (and CER for CTC models) per model.

use std::path::Path;

use clap::ValueEnum;
use phosc_core::metrics::EvalReport;
use phosc_core::model::{Decoder, ModelKind};
use serde::{Deserialize, Serialize};

use super::{read_text, write_bytes};
use crate::error::{PhoscError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Seen samples matched against seen labels, unseen against unseen.
    Zsl,
    /// Every sample matched against the union of seen and unseen labels.
    #[default]
    Gzsl,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Zsl => "zsl",
            Self::Gzsl => "gzsl",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelResult {
    pub name: String,
    pub kind: ModelKind,
    /// Set for CTC models, which are scored by exact match of the decoding.
    pub decoder: Option<Decoder>,
    pub report: EvalReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub protocol: Protocol,
    pub split: String,
    pub models: Vec<ModelResult>,
}

pub fn to_json(summary: &EvalSummary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}

pub fn to_tsv(summary: &EvalSummary) -> String {
    let mut header = vec!["split".to_string()];
    let mut row = vec![summary.split.clone()];
    for m in &summary.models {
        let r = &m.report;
        for (col, v) in [("A_u", r.a_u), ("A_s", r.a_s), ("h", r.h)] {
            header.push(format!("{}:{col}", m.name));
            row.push(format!("{v:.4}"));
        }
        if let Some(cer) = &r.cer {
            header.push(format!("{}:CER", m.name));
            row.push(format!("{:.4}", cer.mean));
        }
    }
    format!("{}\n{}\n", header.join("\t"), row.join("\t"))
}

pub fn read_json(path: &Path) -> Result<EvalSummary> {
    serde_json::from_str(&read_text(path)?).map_err(|e| PhoscError::format(path, e.to_string()))
}

pub fn write(json_path: &Path, tsv_path: &Path, summary: &EvalSummary) -> Result<()> {
    write_bytes(json_path, to_json(summary).as_bytes())?;
    write_bytes(tsv_path, to_tsv(summary).as_bytes())
}
