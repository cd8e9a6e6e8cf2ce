//! Binary checkpoint files.
//!
//! Layout, all integers little-endian:
//!
//! | bytes | content |
//! |-------|---------|
//! | 16    | magic `ENDGAMEZERO-CKPT` |
//! | 4     | format version (u32) |
//! | 8     | parameter version (u64) |
//! | 4     | descriptor length `d` (u32) |
//! | d     | architecture descriptor, UTF-8 |
//! | 8     | weight count `w` (u64) |
//! | 4·w   | weights, f32 |

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{Architecture, NetworkParams};
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: &[u8; 16] = b"ENDGAMEZERO-CKPT";
pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;

pub fn save_params(params: &NetworkParams, path: &Path) -> Result<()> {
    let descriptor = params.architecture.to_string();
    let mut buf = Vec::with_capacity(48 + descriptor.len() + 4 * params.weights.len());
    buf.extend_from_slice(CHECKPOINT_MAGIC);
    buf.extend_from_slice(&CHECKPOINT_FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&params.version.to_le_bytes());
    buf.extend_from_slice(&(descriptor.len() as u32).to_le_bytes());
    buf.extend_from_slice(descriptor.as_bytes());
    buf.extend_from_slice(&(params.weights.len() as u64).to_le_bytes());
    for w in &params.weights {
        buf.extend_from_slice(&w.to_le_bytes());
    }

    // write-then-rename so a crash never leaves a truncated checkpoint behind
    let tmp = path.with_extension("bin.tmp");
    let mut file = fs::File::create(&tmp)?;
    file.write_all(&buf)?;
    file.sync_all()?;
    drop(file);
    fs::rename(&tmp, path)?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Option<&'a [u8]> {
        let end = self.pos.checked_add(n)?;
        let slice = self.bytes.get(self.pos..end)?;
        self.pos = end;
        Some(slice)
    }

    fn u32(&mut self) -> Option<u32> {
        Some(u32::from_le_bytes(self.take(4)?.try_into().ok()?))
    }

    fn u64(&mut self) -> Option<u64> {
        Some(u64::from_le_bytes(self.take(8)?.try_into().ok()?))
    }
}

pub fn load_params(path: &Path) -> Result<NetworkParams> {
    let bytes = fs::read(path)?;
    let fail = |message: &str| Error::Checkpoint {
        path: path.to_path_buf(),
        message: message.to_string(),
    };
    let mut r = Reader {
        bytes: &bytes,
        pos: 0,
    };

    if r.take(16) != Some(CHECKPOINT_MAGIC.as_slice()) {
        return Err(fail("bad magic header"));
    }
    let format = r.u32().ok_or_else(|| fail("truncated header"))?;
    if format != CHECKPOINT_FORMAT_VERSION {
        return Err(Error::CheckpointVersion {
            path: path.to_path_buf(),
            found: format,
            expected: CHECKPOINT_FORMAT_VERSION,
        });
    }
    let version = r.u64().ok_or_else(|| fail("truncated header"))?;
    let dlen = r.u32().ok_or_else(|| fail("truncated header"))? as usize;
    let descriptor = r
        .take(dlen)
        .and_then(|d| std::str::from_utf8(d).ok())
        .ok_or_else(|| fail("unreadable architecture descriptor"))?;
    let architecture: Architecture = descriptor.parse().map_err(|e| fail(&format!("{e}")))?;
    let count = r.u64().ok_or_else(|| fail("truncated weight count"))? as usize;
    if count != architecture.parameter_count() {
        return Err(fail(&format!(
            "weight count {count} does not match descriptor ({} expected)",
            architecture.parameter_count()
        )));
    }
    let raw = r
        .take(count.checked_mul(4).ok_or_else(|| fail("weight count overflow"))?)
        .ok_or_else(|| fail("truncated weights"))?;
    if r.pos != bytes.len() {
        return Err(fail("trailing bytes after weights"));
    }
    let weights: Vec<f32> = raw
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(fail("non-finite weight"));
    }
    Ok(NetworkParams {
        architecture,
        weights,
        version,
    })
}
