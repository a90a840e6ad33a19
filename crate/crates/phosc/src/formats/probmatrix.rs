//! Per-step class probabilities as TSV: a `# symbols=<chars> blank=last`
//! header, then one row per time step with the blank column last.

use std::path::Path;

use phosc_core::ctc::{CtcAlphabet, ProbMatrix};

use super::{read_text, write_bytes};
use crate::error::{PhoscError, Result};

pub fn format(probs: &ProbMatrix, alphabet: &CtcAlphabet) -> String {
    let mut out = format!("# symbols={} blank=last\n", alphabet.as_string());
    for t in 0..probs.rows() {
        let row: Vec<String> = probs.row(t).iter().map(f64::to_string).collect();
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

pub fn parse(text: &str) -> Result<(ProbMatrix, CtcAlphabet), String> {
    let mut lines = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l));
    let header = lines.next().ok_or("empty file")?;
    let symbols = header
        .strip_prefix("# symbols=")
        .and_then(|h| h.strip_suffix(" blank=last"))
        .ok_or("first line must be `# symbols=<chars> blank=last`")?;
    let alphabet = CtcAlphabet::new(symbols.chars()).map_err(|e| e.to_string())?;
    let cols = alphabet.num_classes();
    let mut data = Vec::new();
    let mut rows = 0;
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let before = data.len();
        for field in line.split('\t') {
            let v: f64 = field.trim().parse().map_err(|_| format!("line {}: bad number {field:?}", i + 2))?;
            data.push(v);
        }
        if data.len() - before != cols {
            return Err(format!("line {}: expected {cols} columns, found {}", i + 2, data.len() - before));
        }
        rows += 1;
    }
    let probs = ProbMatrix::new(rows, cols, data).map_err(|e| e.to_string())?;
    Ok((probs, alphabet))
}

pub fn read(path: &Path) -> Result<(ProbMatrix, CtcAlphabet)> {
    parse(&read_text(path)?).map_err(|e| PhoscError::format(path, e))
}

pub fn write(path: &Path, probs: &ProbMatrix, alphabet: &CtcAlphabet) -> Result<()> {
    write_bytes(path, format(probs, alphabet).as_bytes())
}
