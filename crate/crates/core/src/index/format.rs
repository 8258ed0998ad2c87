//! On-disk layout:
//!
//! ```text
//! MAGIC (8 bytes) | version u32 LE | header_len u32 LE | header JSON | body (bincode)
//! ```
//!
//! The header repeats the fingerprint and counts so tools can inspect an index
//! without decoding the body, and carries the body length and SHA-256 so a
//! truncated or corrupted file fails to load instead of yielding a partial
//! index.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Index, IndexError};

pub const MAGIC: &[u8; 8] = b"FZRKIDX\0";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format_version: u32,
    config_fingerprint: String,
    document_count: u32,
    built_at: Option<u64>,
    body_len: u64,
    body_sha256: String,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_index<W: Write>(index: &Index, mut out: W) -> std::io::Result<()> {
    let body = bincode::serialize(index).map_err(std::io::Error::other)?;
    let header = Header {
        format_version: FORMAT_VERSION,
        config_fingerprint: index.config_fingerprint.clone(),
        document_count: index.stats.document_count,
        built_at: index.stats.built_at,
        body_len: body.len() as u64,
        body_sha256: hex(&Sha256::digest(&body)),
    };
    let header = serde_json::to_vec(&header).map_err(std::io::Error::other)?;
    out.write_all(MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&(header.len() as u32).to_le_bytes())?;
    out.write_all(&header)?;
    out.write_all(&body)?;
    out.flush()
}

pub fn read_index<R: Read>(mut input: R) -> Result<Index, IndexError> {
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| IndexError::Parse(e.to_string()))?;
    decode(&bytes)
}

fn take<'a>(bytes: &'a [u8], at: &mut usize, n: usize, what: &str) -> Result<&'a [u8], IndexError> {
    let end = at
        .checked_add(n)
        .filter(|e| *e <= bytes.len())
        .ok_or_else(|| IndexError::Parse(format!("truncated {what}")))?;
    let s = &bytes[*at..end];
    *at = end;
    Ok(s)
}

fn decode(bytes: &[u8]) -> Result<Index, IndexError> {
    let mut at = 0;
    if take(bytes, &mut at, MAGIC.len(), "magic")? != MAGIC {
        return Err(IndexError::Parse("not a fuzzyrank index file".into()));
    }
    let version = u32::from_le_bytes(take(bytes, &mut at, 4, "version")?.try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(IndexError::VersionMismatch {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let header_len = u32::from_le_bytes(take(bytes, &mut at, 4, "header length")?.try_into().expect("4 bytes"));
    let header: Header = serde_json::from_slice(take(bytes, &mut at, header_len as usize, "header")?)
        .map_err(|e| IndexError::Parse(format!("header: {e}")))?;
    if header.format_version != FORMAT_VERSION {
        return Err(IndexError::VersionMismatch {
            found: header.format_version,
            expected: FORMAT_VERSION,
        });
    }
    let body = &bytes[at..];
    if body.len() as u64 != header.body_len {
        return Err(IndexError::Parse(format!(
            "body is {} bytes, header says {}",
            body.len(),
            header.body_len
        )));
    }
    if hex(&Sha256::digest(body)) != header.body_sha256 {
        return Err(IndexError::Parse("body checksum mismatch".into()));
    }
    let index: Index = bincode::deserialize(body).map_err(|e| IndexError::Parse(format!("body: {e}")))?;
    if index.config_fingerprint != header.config_fingerprint {
        return Err(IndexError::Parse("header and body fingerprints differ".into()));
    }
    Ok(index)
}

pub fn save_index(index: &Index, path: &Path) -> Result<(), IndexError> {
    let io = |source| IndexError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut buf = Vec::new();
    write_index(index, &mut buf).map_err(io)?;
    std::fs::write(path, buf).map_err(io)
}

pub fn load_index(path: &Path) -> Result<Index, IndexError> {
    let bytes = std::fs::read(path).map_err(|source| IndexError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode(&bytes)
}
