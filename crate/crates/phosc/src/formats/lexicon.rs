//! `word<TAB>seen|unseen`; signatures are recomputed on load.

use std::path::Path;

use super::{data_lines, read_text, write_bytes};
use crate::error::{PhoscError, Result};

/// Seen and unseen word lists in file order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LexiconFile {
    pub seen: Vec<String>,
    pub unseen: Vec<String>,
}

pub fn format(lex: &LexiconFile) -> String {
    let mut out = String::new();
    for w in &lex.seen {
        out.push_str(&format!("{w}\tseen\n"));
    }
    for w in &lex.unseen {
        out.push_str(&format!("{w}\tunseen\n"));
    }
    out
}

pub fn parse(text: &str) -> Result<LexiconFile, String> {
    let mut lex = LexiconFile::default();
    for (n, line) in data_lines(text) {
        match line.split_once('\t') {
            Some((w, "seen")) if !w.is_empty() => lex.seen.push(w.into()),
            Some((w, "unseen")) if !w.is_empty() => lex.unseen.push(w.into()),
            _ => return Err(format!("line {n}: expected word<TAB>seen|unseen")),
        }
    }
    Ok(lex)
}

pub fn read(path: &Path) -> Result<LexiconFile> {
    parse(&read_text(path)?).map_err(|e| PhoscError::format(path, e))
}

pub fn write(path: &Path, lex: &LexiconFile) -> Result<()> {
    write_bytes(path, format(lex).as_bytes())
}
