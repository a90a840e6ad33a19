//! `PHOSC1` magic, little-endian `u32` header length, UTF-8 JSON header,
//! then every tensor as little-endian `f32` in header order.

use std::path::Path;

use phosc_core::model::{Checkpoint, CheckpointHeader};

use super::{read_bytes, write_bytes};
use crate::error::{PhoscError, Result};

pub const MAGIC: &[u8; 6] = b"PHOSC1";

pub fn encode(ckpt: &Checkpoint) -> Vec<u8> {
    let header = serde_json::to_vec(&ckpt.header).expect("header serializes");
    let floats: usize = ckpt.data.iter().map(Vec::len).sum();
    let mut out = Vec::with_capacity(MAGIC.len() + 4 + header.len() + 4 * floats);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&u32::try_from(header.len()).expect("header under 4 GiB").to_le_bytes());
    out.extend_from_slice(&header);
    for t in &ckpt.data {
        for v in t {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<Checkpoint, String> {
    let rest = bytes.strip_prefix(MAGIC.as_slice()).ok_or("missing PHOSC1 magic")?;
    let (len, rest) = rest.split_first_chunk::<4>().ok_or("truncated header length")?;
    let len = u32::from_le_bytes(*len) as usize;
    if rest.len() < len {
        return Err("truncated header".into());
    }
    let (header, mut data) = rest.split_at(len);
    let header: CheckpointHeader = serde_json::from_slice(header).map_err(|e| format!("header: {e}"))?;
    let mut tensors = Vec::with_capacity(header.tensors.len());
    for info in &header.tensors {
        if info.dtype != "f32" {
            return Err(format!("tensor {} has unsupported dtype {}", info.name, info.dtype));
        }
        let n: usize = info.shape.iter().product();
        if data.len() < 4 * n {
            return Err(format!("tensor {} is truncated", info.name));
        }
        let (chunk, tail) = data.split_at(4 * n);
        tensors.push(
            chunk
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes(b.try_into().expect("four bytes")))
                .collect(),
        );
        data = tail;
    }
    if !data.is_empty() {
        return Err(format!("{} trailing bytes", data.len()));
    }
    Ok(Checkpoint { header, data: tensors })
}

pub fn read(path: &Path) -> Result<Checkpoint> {
    decode(&read_bytes(path)?).map_err(|e| PhoscError::format(path, e))
}

pub fn write(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    write_bytes(path, &encode(ckpt))
}
