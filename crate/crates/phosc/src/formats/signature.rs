//! `word<TAB>comma-separated vector`, one word per line in input order.

use clap::ValueEnum;
use phosc_core::signature::{AttributeSignature, SignatureEncoder};
use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignatureMode {
    Phos,
    Phoc,
    #[default]
    Phosc,
}

pub fn select(sig: &AttributeSignature, mode: SignatureMode) -> &[f32] {
    match mode {
        SignatureMode::Phos => &sig.phos,
        SignatureMode::Phoc => &sig.phoc,
        SignatureMode::Phosc => &sig.combined,
    }
}

pub fn format_row(word: &str, values: &[f32]) -> String {
    let v: Vec<String> = values.iter().map(f32::to_string).collect();
    format!("{word}\t{}\n", v.join(","))
}

pub fn encode_words<S: AsRef<str>>(words: &[S], encoder: &SignatureEncoder, mode: SignatureMode) -> Result<String> {
    let mut out = String::new();
    for w in words {
        let sig = encoder.encode(w.as_ref())?;
        out.push_str(&format_row(w.as_ref(), select(&sig, mode)));
    }
    Ok(out)
}

pub fn parse(text: &str) -> Result<Vec<(String, Vec<f32>)>, String> {
    super::data_lines(text)
        .map(|(n, line)| {
            let (word, values) = line.split_once('\t').ok_or(format!("line {n}: missing tab"))?;
            let values = values
                .split(',')
                .map(|v| v.parse::<f32>().map_err(|_| format!("line {n}: bad value {v:?}")))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((word.to_string(), values))
        })
        .collect()
}
