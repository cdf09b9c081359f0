//! Binary field snapshots.
//!
//! Layout: the magic bytes `FTCF1\n`, a `u32` little-endian header length,
//! a TOML header with keys `d, n, box_length, components, time, alpha, beta,
//! field_name`, then `components · n^d` little-endian `f64` values in the
//! same component-block, row-major order as [`Field`].

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::grid::{Field, GridSpec};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 6] = b"FTCF1\n";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub d: usize,
    pub n: usize,
    pub box_length: f64,
    pub components: usize,
    pub time: f64,
    pub alpha: f64,
    pub beta: f64,
    pub field_name: String,
}

impl SnapshotHeader {
    pub fn for_field(field: &Field, time: f64, alpha: f64, beta: f64, field_name: &str) -> Self {
        let g = field.grid();
        Self {
            d: g.d(),
            n: g.n(),
            box_length: g.box_length(),
            components: field.components(),
            time,
            alpha,
            beta,
            field_name: field_name.to_string(),
        }
    }
}

pub fn encode(header: &SnapshotHeader, field: &Field) -> Result<Vec<u8>> {
    let g = field.grid();
    if header.d != g.d() || header.n != g.n() || header.components != field.components() {
        return Err(Error::Format("header does not describe the field".into()));
    }
    let text = toml::to_string(header).map_err(|e| Error::Format(e.to_string()))?;
    let mut out = Vec::with_capacity(10 + text.len() + 8 * field.values().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(text.len() as u32).to_le_bytes());
    out.extend_from_slice(text.as_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<(SnapshotHeader, Field)> {
    if bytes.len() < 10 || &bytes[..6] != MAGIC {
        return Err(Error::Format("missing FTCF1 magic".into()));
    }
    let hlen = u32::from_le_bytes([bytes[6], bytes[7], bytes[8], bytes[9]]) as usize;
    let body = bytes
        .get(10..10 + hlen)
        .ok_or_else(|| Error::Format("truncated header".into()))?;
    let text = std::str::from_utf8(body).map_err(|e| Error::Format(e.to_string()))?;
    let header: SnapshotHeader = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let grid = GridSpec::new(header.d, header.n, header.box_length)?;
    let count = header.components * grid.size();
    let data = &bytes[10 + hlen..];
    if data.len() != 8 * count {
        return Err(Error::Format(format!("expected {} data bytes, found {}", 8 * count, data.len())));
    }
    let values = data
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    let field = Field::new(grid, header.components, values)?;
    Ok((header, field))
}

pub fn write_snapshot(path: &Path, header: &SnapshotHeader, field: &Field) -> Result<()> {
    let bytes = encode(header, field)?;
    let mut f = std::fs::File::create(path)?;
    f.write_all(&bytes)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(SnapshotHeader, Field)> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}
