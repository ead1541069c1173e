//! Binary escape-field layout and plain PBM (P4) masks.
//!
//! Escape field: `b"ESCF"`, `u32` width, `u32` height, then per pixel in
//! row-major order a `u8` verdict code followed by a `u16` first-escape
//! iteration (`0xFFFF` when absent), all little-endian.

use super::{EscapeField, Mask, Verdict};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const MAGIC: &[u8; 4] = b"ESCF";
const NO_ESCAPE: u16 = 0xFFFF;

pub fn encode_escape_field<T: Scalar>(field: &EscapeField<T>) -> Vec<u8> {
    let n = field.grid.len();
    let mut out = Vec::with_capacity(12 + 3 * n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(field.grid.width as u32).to_le_bytes());
    out.extend_from_slice(&(field.grid.height as u32).to_le_bytes());
    for (v, it) in field.verdicts.iter().zip(&field.first_escape_iter) {
        out.push(v.code());
        // iterations that do not fit are clamped below the sentinel
        let it = it.map_or(NO_ESCAPE, |i| i.min(u32::from(NO_ESCAPE - 1)) as u16);
        out.extend_from_slice(&it.to_le_bytes());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodedField {
    pub width: usize,
    pub height: usize,
    pub verdicts: Vec<Verdict>,
    pub first_escape_iter: Vec<Option<u16>>,
}

pub fn decode_escape_field(bytes: &[u8]) -> Result<DecodedField> {
    if bytes.len() < 12 || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing ESCF header".into()));
    }
    let u32_at = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
    let (width, height) = (u32_at(4), u32_at(8));
    let n = width
        .checked_mul(height)
        .ok_or_else(|| Error::Format("grid size overflows".into()))?;
    if bytes.len() != 12 + 3 * n {
        return Err(Error::Format(format!(
            "expected {} bytes for {width}x{height}, found {}",
            12 + 3 * n,
            bytes.len()
        )));
    }
    let mut verdicts = Vec::with_capacity(n);
    let mut first = Vec::with_capacity(n);
    for rec in bytes[12..].chunks_exact(3) {
        verdicts.push(
            Verdict::from_code(rec[0]).ok_or_else(|| Error::Format(format!("bad verdict code {}", rec[0])))?,
        );
        let it = u16::from_le_bytes([rec[1], rec[2]]);
        first.push((it != NO_ESCAPE).then_some(it));
    }
    Ok(DecodedField { width, height, verdicts, first_escape_iter: first })
}

/// Set bits are written as 1 (black in PBM viewers).
pub fn encode_pbm<T: Scalar>(m: &Mask<T>) -> Vec<u8> {
    let (w, h) = (m.grid().width, m.grid().height);
    let mut out = format!("P4\n{w} {h}\n").into_bytes();
    let row_bytes = w.div_ceil(8);
    for row in m.bits().chunks(w) {
        let mut packed = vec![0u8; row_bytes];
        for (i, &b) in row.iter().enumerate() {
            if b {
                packed[i / 8] |= 0x80 >> (i % 8);
            }
        }
        out.extend_from_slice(&packed);
    }
    debug_assert_eq!(out.len(), format!("P4\n{w} {h}\n").len() + row_bytes * h);
    out
}

/// Parses a P4 file into `(width, height, bits)`. Comments are not supported.
pub fn decode_pbm(bytes: &[u8]) -> Result<(usize, usize, Vec<bool>)> {
    let bad = |m: &str| Error::Format(format!("pbm: {m}"));
    if !bytes.starts_with(b"P4") {
        return Err(bad("missing P4 magic"));
    }
    let mut pos = 2;
    let mut fields = [0usize; 2];
    for f in fields.iter_mut() {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        *f = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad dimension"))?;
    }
    // exactly one whitespace byte before the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(bad("missing raster separator"));
    }
    pos += 1;
    let [w, h] = fields;
    let row_bytes = w.div_ceil(8);
    if bytes.len() - pos != row_bytes * h {
        return Err(bad("raster size mismatch"));
    }
    let mut bits = Vec::with_capacity(w * h);
    for row in bytes[pos..].chunks(row_bytes.max(1)).take(h) {
        for i in 0..w {
            bits.push(row[i / 8] & (0x80 >> (i % 8)) != 0);
        }
    }
    Ok((w, h, bits))
}
