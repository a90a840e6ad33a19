//! Training log: one JSON object per epoch.

use std::path::Path;

use phosc_core::model::EpochRecord;

use super::{read_text, write_bytes};
use crate::error::{PhoscError, Result};

pub fn format_record(r: &EpochRecord) -> String {
    let mut line = serde_json::to_string(r).expect("record serializes");
    line.push('\n');
    line
}

pub fn parse(text: &str) -> Result<Vec<EpochRecord>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| format!("line {}: {e}", i + 1)))
        .collect()
}

pub fn read(path: &Path) -> Result<Vec<EpochRecord>> {
    parse(&read_text(path)?).map_err(|e| PhoscError::format(path, e))
}

pub fn write(path: &Path, records: &[EpochRecord]) -> Result<()> {
    let text: String = records.iter().map(format_record).collect();
    write_bytes(path, text.as_bytes())
}
