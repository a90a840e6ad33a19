//! `path<TAB>label<TAB>partition`, one image per line, paths relative to the
//! manifest's directory.

use std::path::Path;

use phosc_core::synth::{ManifestRow, Partition};

use super::{data_lines, read_text, write_bytes};
use crate::error::{PhoscError, Result};

pub fn format(rows: &[ManifestRow]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&format!("{}\t{}\t{}\n", r.path, r.label, r.partition));
    }
    out
}

pub fn parse(text: &str) -> Result<Vec<ManifestRow>, String> {
    data_lines(text)
        .map(|(n, line)| {
            let fields: Vec<&str> = line.split('\t').collect();
            let [path, label, partition] = fields[..] else {
                return Err(format!("line {n}: expected 3 tab-separated fields, found {}", fields.len()));
            };
            let partition: Partition = partition.parse().map_err(|e| format!("line {n}: {e}"))?;
            if path.is_empty() || label.is_empty() {
                return Err(format!("line {n}: empty path or label"));
            }
            Ok(ManifestRow {
                path: path.into(),
                label: label.into(),
                partition,
            })
        })
        .collect()
}

pub fn read(path: &Path) -> Result<Vec<ManifestRow>> {
    parse(&read_text(path)?).map_err(|e| PhoscError::format(path, e))
}

pub fn write(path: &Path, rows: &[ManifestRow]) -> Result<()> {
    write_bytes(path, format(rows).as_bytes())
}
