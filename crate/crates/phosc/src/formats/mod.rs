//! On-disk formats. Each submodule pairs pure `parse`/`format` (or
//! `encode`/`decode`) functions with path-based helpers.

pub mod checkpoint;
pub mod lexicon;
pub mod log;
pub mod manifest;
pub mod pgm;
pub mod probmatrix;
pub mod report;
pub mod signature;

use std::fs;
use std::path::Path;

use crate::error::{PhoscError, Result};

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| PhoscError::read(path, e))
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| PhoscError::read(path, e))
}

/// Writes `bytes`, creating parent directories as needed.
pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| PhoscError::write(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| PhoscError::write(path, e))
}

/// Non-empty lines that are not `#` comments, with 1-based line numbers.
pub(crate) fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}
