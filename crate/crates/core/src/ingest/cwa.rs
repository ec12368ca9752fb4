//! Simplified block-structured logger format (unpacked 16-bit mode only).
//!
//! Layout, all integers little-endian:
//!
//! Header block, 1024 bytes:
//!
//! | offset | size | field                                   |
//! |--------|------|-----------------------------------------|
//! | 0      | 2    | tag `"MD"`                              |
//! | 2      | 2    | u16 block length after this field, 1020 |
//! | 4      | 1    | u8 device id length, at most 64         |
//! | 5      | n    | device id, UTF-8                        |
//! | 128    | 8    | f64 nominal sampling rate in Hz         |
//!
//! Data block, 512 bytes, repeated:
//!
//! | offset | size | field                                        |
//! |--------|------|----------------------------------------------|
//! | 0      | 2    | tag `"AX"`                                   |
//! | 2      | 2    | u16 block length after this field, 508       |
//! | 4      | 8    | u64 timestamp of the first sample, ms        |
//! | 12     | 2    | u16 sample count, at most 80                 |
//! | 14     | 6n   | n triplets of i16 x, y, z at 1/256 g per LSB |
//! | 510    | 2    | u16 checksum                                 |
//!
//! The checksum is chosen so the wrapping sum of all 256 u16 words in the
//! block is zero. Unused bytes are zero. Sample `i` of a block is stamped
//! `timestamp + i * 1000 / rate`.

use super::{IngestError, RawRecording, Sample, FULL_SCALE_G};

pub const HEADER_LEN: usize = 1024;
pub const BLOCK_LEN: usize = 512;
pub const MAX_SAMPLES_PER_BLOCK: usize = 80;
pub const UNITS_PER_G: f64 = 256.0;
const RATE_OFFSET: usize = 128;
const MAX_DEVICE_ID: usize = 64;
const PAYLOAD_OFFSET: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub enum CwaWarning {
    ChecksumMismatch { block: usize },
    BadBlockTag { block: usize },
    BadSampleCount { block: usize, count: usize },
    OutOfRange { block: usize },
    NonMonotonicTimestamp { block: usize },
    TrailingBytes { len: usize },
}

impl std::fmt::Display for CwaWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CwaWarning::ChecksumMismatch { block } => {
                write!(f, "block {block}: checksum mismatch, skipped")
            }
            CwaWarning::BadBlockTag { block } => write!(f, "block {block}: unknown tag, skipped"),
            CwaWarning::BadSampleCount { block, count } => {
                write!(f, "block {block}: sample count {count} exceeds 80, skipped")
            }
            CwaWarning::OutOfRange { block } => {
                write!(f, "block {block}: acceleration beyond ±16 g, skipped")
            }
            CwaWarning::NonMonotonicTimestamp { block } => {
                write!(f, "block {block}: timestamp goes backwards, skipped")
            }
            CwaWarning::TrailingBytes { len } => write!(f, "{len} trailing bytes ignored"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CwaParse {
    pub recording: RawRecording,
    pub warnings: Vec<CwaWarning>,
}

fn u16_at(b: &[u8], off: usize) -> u16 {
    u16::from_le_bytes([b[off], b[off + 1]])
}

fn block_checksum_ok(block: &[u8]) -> bool {
    block
        .chunks_exact(2)
        .fold(0u16, |acc, w| acc.wrapping_add(u16::from_le_bytes([w[0], w[1]])))
        == 0
}

pub fn parse_cwa(bytes: &[u8]) -> Result<CwaParse, IngestError> {
    if bytes.len() < 2 || &bytes[..2] != b"MD" {
        return Err(IngestError::MalformedHeader("missing MD tag".into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(IngestError::MalformedHeader(format!(
            "header truncated at {} bytes",
            bytes.len()
        )));
    }
    let header = &bytes[..HEADER_LEN];
    if u16_at(header, 2) as usize != HEADER_LEN - 4 {
        return Err(IngestError::MalformedHeader("bad header length field".into()));
    }
    let id_len = header[4] as usize;
    if id_len > MAX_DEVICE_ID {
        return Err(IngestError::MalformedHeader("device id too long".into()));
    }
    let device_id = std::str::from_utf8(&header[5..5 + id_len])
        .map_err(|_| IngestError::MalformedHeader("device id is not UTF-8".into()))?
        .to_string();
    let rate = f64::from_le_bytes(header[RATE_OFFSET..RATE_OFFSET + 8].try_into().unwrap());
    if !(rate.is_finite() && rate > 0.0) {
        return Err(IngestError::MalformedHeader(format!("nominal rate {rate}")));
    }
    let period = 1000.0 / rate;

    let body = &bytes[HEADER_LEN..];
    let mut warnings = Vec::new();
    let mut samples: Vec<Sample> = Vec::new();
    let mut blocks = body.chunks_exact(BLOCK_LEN);
    for (idx, block) in blocks.by_ref().enumerate() {
        if &block[..2] != b"AX" || u16_at(block, 2) as usize != BLOCK_LEN - 4 {
            warnings.push(CwaWarning::BadBlockTag { block: idx });
            continue;
        }
        if !block_checksum_ok(block) {
            warnings.push(CwaWarning::ChecksumMismatch { block: idx });
            continue;
        }
        let count = u16_at(block, 12) as usize;
        if count > MAX_SAMPLES_PER_BLOCK {
            warnings.push(CwaWarning::BadSampleCount { block: idx, count });
            continue;
        }
        let t0 = u64::from_le_bytes(block[4..12].try_into().unwrap()) as f64;
        if samples.last().is_some_and(|last| t0 <= last.t) {
            warnings.push(CwaWarning::NonMonotonicTimestamp { block: idx });
            continue;
        }
        let decoded: Vec<Sample> = (0..count)
            .map(|i| {
                let off = PAYLOAD_OFFSET + 6 * i;
                let axis = |k: usize| i16::from_le_bytes([block[off + 2 * k], block[off + 2 * k + 1]]);
                Sample::new(
                    t0 + i as f64 * period,
                    axis(0) as f64 / UNITS_PER_G,
                    axis(1) as f64 / UNITS_PER_G,
                    axis(2) as f64 / UNITS_PER_G,
                )
            })
            .collect();
        if decoded
            .iter()
            .any(|s| s.x.abs() > FULL_SCALE_G || s.y.abs() > FULL_SCALE_G || s.z.abs() > FULL_SCALE_G)
        {
            warnings.push(CwaWarning::OutOfRange { block: idx });
            continue;
        }
        samples.extend(decoded);
    }
    let rest = blocks.remainder().len();
    if rest > 0 {
        warnings.push(CwaWarning::TrailingBytes { len: rest });
    }
    if samples.is_empty() {
        return Err(IngestError::EmptyRecording);
    }
    Ok(CwaParse {
        recording: RawRecording {
            device_id,
            nominal_rate_hz: rate,
            samples,
        },
        warnings,
    })
}

/// Writes `rec` with the maximum of 80 samples per block.
pub fn write_cwa(rec: &RawRecording) -> Result<Vec<u8>, IngestError> {
    write_cwa_blocks(rec, MAX_SAMPLES_PER_BLOCK)
}

/// Writes `rec` with `per_block` samples per data block.
///
/// Each block stores only the first sample's timestamp (rounded to whole
/// milliseconds), so timestamps survive a round trip exactly only when the
/// recording is uniformly spaced at its nominal rate from an integer start.
pub fn write_cwa_blocks(rec: &RawRecording, per_block: usize) -> Result<Vec<u8>, IngestError> {
    if per_block == 0 || per_block > MAX_SAMPLES_PER_BLOCK {
        return Err(IngestError::InvalidRecording(format!(
            "{per_block} samples per block"
        )));
    }
    let id = rec.device_id.as_bytes();
    if id.len() > MAX_DEVICE_ID {
        return Err(IngestError::InvalidRecording("device id longer than 64 bytes".into()));
    }
    rec.check()?;

    let mut out = vec![0u8; HEADER_LEN];
    out[..2].copy_from_slice(b"MD");
    out[2..4].copy_from_slice(&((HEADER_LEN - 4) as u16).to_le_bytes());
    out[4] = id.len() as u8;
    out[5..5 + id.len()].copy_from_slice(id);
    out[RATE_OFFSET..RATE_OFFSET + 8].copy_from_slice(&rec.nominal_rate_hz.to_le_bytes());

    for chunk in rec.samples.chunks(per_block) {
        let mut block = [0u8; BLOCK_LEN];
        block[..2].copy_from_slice(b"AX");
        block[2..4].copy_from_slice(&((BLOCK_LEN - 4) as u16).to_le_bytes());
        block[4..12].copy_from_slice(&(chunk[0].t.round() as u64).to_le_bytes());
        block[12..14].copy_from_slice(&(chunk.len() as u16).to_le_bytes());
        for (i, s) in chunk.iter().enumerate() {
            let off = PAYLOAD_OFFSET + 6 * i;
            for (k, v) in [s.x, s.y, s.z].into_iter().enumerate() {
                let q = (v * UNITS_PER_G).round() as i16;
                block[off + 2 * k..off + 2 * k + 2].copy_from_slice(&q.to_le_bytes());
            }
        }
        let sum = block[..BLOCK_LEN - 2]
            .chunks_exact(2)
            .fold(0u16, |acc, w| acc.wrapping_add(u16::from_le_bytes([w[0], w[1]])));
        block[BLOCK_LEN - 2..].copy_from_slice(&0u16.wrapping_sub(sum).to_le_bytes());
        out.extend_from_slice(&block);
    }
    Ok(out)
}
