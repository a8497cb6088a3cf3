//! On-disk baby-step tables for `e(g1, h2)`, keyed by parameter hash, base
//! and bound.
//!
//! Layout: magic, version byte, params hash, length-prefixed base encoding,
//! bound (u64), baby steps (u32), entry count (u32), entries as
//! `(fingerprint u64, exponent u32)`, then a SHA-256 of everything before.
//! Integers are big-endian.

use std::{fs, path::Path};

use anyhow::{bail, ensure, Context};
use ppats::{group::Group, Backend, DlogTable, GroupParams};
use sha2::{Digest, Sha256};

use crate::json::write_bytes;

const MAGIC: &[u8; 8] = b"PPATSDLG";
const VERSION: u8 = 1;

pub fn encode<B: Backend>(params: &GroupParams<B>, table: &DlogTable<B::Gt>, bound: u64) -> Vec<u8> {
    let gt = params.backend().gt();
    let base = gt.encode(table.base());
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(params.description_hash());
    out.extend_from_slice(&(base.len() as u32).to_be_bytes());
    out.extend_from_slice(&base);
    out.extend_from_slice(&bound.to_be_bytes());
    out.extend_from_slice(&(table.baby_steps() as u32).to_be_bytes());
    let entries: Vec<_> = table.entries().collect();
    out.extend_from_slice(&(entries.len() as u32).to_be_bytes());
    for (fingerprint, j) in entries {
        out.extend_from_slice(&fingerprint.to_be_bytes());
        out.extend_from_slice(&j.to_be_bytes());
    }
    let checksum = Sha256::digest(&out);
    out.extend_from_slice(&checksum);
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> anyhow::Result<&'a [u8]> {
        let end = self.offset.checked_add(n).filter(|&end| end <= self.bytes.len());
        let Some(end) = end else {
            bail!("truncated at byte offset {}", self.bytes.len());
        };
        let out = &self.bytes[self.offset..end];
        self.offset = end;
        Ok(out)
    }

    fn u32(&mut self) -> anyhow::Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into()?))
    }

    fn u64(&mut self) -> anyhow::Result<u64> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into()?))
    }
}

/// A decoded table with the bound it was built for. `Ok(None)` means the file
/// is intact but keyed to other parameters, another base or a smaller bound.
pub fn decode<B: Backend>(
    params: &GroupParams<B>,
    bytes: &[u8],
    bound: u64,
) -> anyhow::Result<Option<DlogTable<B::Gt>>> {
    ensure!(bytes.len() >= 32, "truncated at byte offset {}", bytes.len());
    let (body, checksum) = bytes.split_at(bytes.len() - 32);
    ensure!(Sha256::digest(body).as_slice() == checksum, "checksum mismatch");
    let mut reader = Reader { bytes: body, offset: 0 };
    ensure!(reader.take(8)? == MAGIC, "not a baby-step table file");
    ensure!(reader.take(1)? == [VERSION], "unsupported table version");
    let hash = reader.take(32)?;
    let base_len = reader.u32()? as usize;
    let base = reader.take(base_len)?;
    let cached_bound = reader.u64()?;
    let baby_steps = reader.u32()?;
    let count = reader.u32()? as usize;
    let mut entries = Vec::with_capacity(count.min(body.len() / 12));
    for _ in 0..count {
        let fingerprint = reader.u64()?;
        entries.push((fingerprint, reader.u32()?));
    }
    ensure!(reader.offset == body.len(), "trailing bytes at offset {}", reader.offset);

    let gt = params.backend().gt();
    let expected_base = params.gt_h2();
    if hash != params.description_hash() || base != gt.encode(&expected_base) || cached_bound < bound {
        return Ok(None);
    }
    Ok(Some(DlogTable::from_entries(gt, expected_base, baby_steps, entries)))
}

/// Loads the table at `path` or builds one for `bound` and stores it there.
/// Returns the table and whether it came from the file.
pub fn load_or_build<B: Backend>(
    params: &GroupParams<B>,
    path: &Path,
    bound: u64,
) -> anyhow::Result<(DlogTable<B::Gt>, bool)> {
    if path.exists() {
        let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        if let Some(table) = decode(params, &bytes, bound).with_context(|| format!("loading {}", path.display()))? {
            return Ok((table, true));
        }
    }
    let table = DlogTable::for_bound(params.backend().gt(), params.gt_h2(), bound);
    write_bytes(path, &encode(params, &table, bound))?;
    Ok((table, false))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ppats::Toy;

    #[test]
    fn round_trip_and_rejection() {
        let params = GroupParams::<Toy>::setup(&1_000_003, b"cache").unwrap();
        let table = DlogTable::for_bound(params.backend().gt(), params.gt_h2(), 500);
        let bytes = encode(&params, &table, 500);
        let loaded = decode(&params, &bytes, 400).unwrap().unwrap();
        assert_eq!(loaded.entries().collect::<Vec<_>>(), table.entries().collect::<Vec<_>>());
        let target = params.backend().gt().pow_raw(&params.gt_h2(), &params.scalar(321));
        assert_eq!(loaded.extract(params.backend().gt(), &target, 500), Ok(321));

        assert!(decode(&params, &bytes, 501).unwrap().is_none());
        let other = GroupParams::<Toy>::setup(&1_000_003, b"other").unwrap();
        assert!(decode(&other, &bytes, 10).unwrap().is_none());

        let mut corrupt = bytes.clone();
        corrupt[20] ^= 1;
        assert!(decode(&params, &corrupt, 10).is_err());
        assert!(decode(&params, &bytes[..bytes.len() - 1], 10).is_err());
    }
}
