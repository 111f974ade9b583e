//! Read-optimized on-disk hash table.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! header     "PLEX" | version u32 = 1 | bucket_count u32 | entry_count u32
//! directory  bucket_count x (offset u64, record_count u32)
//! records    per bucket, contiguous:
//!            key_len u16 | key | val_len u32 | value | crc32(key ++ value) u32
//! ```
//!
//! Buckets are chosen by FNV-1a 64 of the lowercased key modulo
//! `bucket_count`, the smallest power of two at least twice the entry count.
//! The table is written once, in batch, and never updated in place.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::os::unix::fs::FileExt;
use std::path::Path;

use serde::Serialize;

use super::LexiconError;

pub const MAGIC: &[u8; 4] = b"PLEX";
pub const VERSION: u32 = 1;
const HEADER_LEN: u64 = 16;
const DIR_ENTRY_LEN: u64 = 12;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn bucket_count_for(entries: usize) -> u32 {
    (2 * entries as u64).max(1).next_power_of_two() as u32
}

fn bucket_of(key: &str, bucket_count: u32) -> usize {
    (fnv1a64(key.to_lowercase().as_bytes()) % bucket_count as u64) as usize
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TableStats {
    pub entries: usize,
    pub buckets: u32,
    pub occupied_buckets: usize,
    pub max_bucket_len: usize,
    pub mean_occupied_len: f64,
}

/// Writes `(key, value)` pairs; keys must already be unique and lowercased.
pub fn write_table(path: &Path, entries: &[(String, String)]) -> Result<TableStats, LexiconError> {
    let bucket_count = bucket_count_for(entries.len());
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); bucket_count as usize];
    for (i, (k, _)) in entries.iter().enumerate() {
        buckets[bucket_of(k, bucket_count)].push(i);
    }

    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&bucket_count.to_le_bytes())?;
    out.write_all(&(entries.len() as u32).to_le_bytes())?;

    let record_len = |i: usize| {
        let (k, v) = &entries[i];
        2 + k.len() as u64 + 4 + v.len() as u64 + 4
    };
    let mut offset = HEADER_LEN + DIR_ENTRY_LEN * bucket_count as u64;
    for b in &buckets {
        out.write_all(&offset.to_le_bytes())?;
        out.write_all(&(b.len() as u32).to_le_bytes())?;
        offset += b.iter().map(|&i| record_len(i)).sum::<u64>();
    }
    for b in &buckets {
        for &i in b {
            let (k, v) = &entries[i];
            let klen: u16 = k
                .len()
                .try_into()
                .map_err(|_| LexiconError::Corrupt(format!("key too long: {k}")))?;
            let vlen: u32 = v
                .len()
                .try_into()
                .map_err(|_| LexiconError::Corrupt(format!("value too long for {k}")))?;
            let mut crc = crc32fast::Hasher::new();
            crc.update(k.as_bytes());
            crc.update(v.as_bytes());
            out.write_all(&klen.to_le_bytes())?;
            out.write_all(k.as_bytes())?;
            out.write_all(&vlen.to_le_bytes())?;
            out.write_all(v.as_bytes())?;
            out.write_all(&crc.finalize().to_le_bytes())?;
        }
    }
    out.flush()?;

    let occupied: Vec<usize> = buckets.iter().map(Vec::len).filter(|&n| n > 0).collect();
    Ok(TableStats {
        entries: entries.len(),
        buckets: bucket_count,
        occupied_buckets: occupied.len(),
        max_bucket_len: occupied.iter().copied().max().unwrap_or(0),
        mean_occupied_len: if occupied.is_empty() {
            0.0
        } else {
            entries.len() as f64 / occupied.len() as f64
        },
    })
}

/// An open secondary table. Reads are positional, so one handle serves
/// concurrent lookups.
#[derive(Debug)]
pub struct SecondaryTable {
    file: File,
    bucket_count: u32,
    entry_count: u32,
    directory: Vec<(u64, u32)>,
    file_len: u64,
}

fn le_u32(b: &[u8]) -> u32 {
    u32::from_le_bytes(b[..4].try_into().unwrap())
}

impl SecondaryTable {
    pub fn open(path: &Path) -> Result<Self, LexiconError> {
        let file = File::open(path)?;
        let file_len = file.metadata()?.len();
        let mut header = [0u8; HEADER_LEN as usize];
        file.read_exact_at(&mut header, 0)
            .map_err(|_| LexiconError::Corrupt("truncated header".into()))?;
        if &header[..4] != MAGIC {
            return Err(LexiconError::Corrupt("bad magic".into()));
        }
        let version = le_u32(&header[4..]);
        if version != VERSION {
            return Err(LexiconError::Corrupt(format!("unsupported version {version}")));
        }
        let bucket_count = le_u32(&header[8..]);
        let entry_count = le_u32(&header[12..]);
        if bucket_count == 0 {
            return Err(LexiconError::Corrupt("zero buckets".into()));
        }
        let mut dir = vec![0u8; (DIR_ENTRY_LEN * bucket_count as u64) as usize];
        file.read_exact_at(&mut dir, HEADER_LEN)
            .map_err(|_| LexiconError::Corrupt("truncated directory".into()))?;
        let directory = dir
            .chunks_exact(DIR_ENTRY_LEN as usize)
            .map(|c| (u64::from_le_bytes(c[..8].try_into().unwrap()), le_u32(&c[8..])))
            .collect();
        Ok(SecondaryTable {
            file,
            bucket_count,
            entry_count,
            directory,
            file_len,
        })
    }

    pub fn len(&self) -> usize {
        self.entry_count as usize
    }

    pub fn is_empty(&self) -> bool {
        self.entry_count == 0
    }

    pub fn bucket_count(&self) -> u32 {
        self.bucket_count
    }

    pub fn get(&self, key: &str) -> Result<Option<String>, LexiconError> {
        let key = key.to_lowercase();
        let b = bucket_of(&key, self.bucket_count);
        let (start, count) = self.directory[b];
        if count == 0 {
            return Ok(None);
        }
        let end = self
            .directory
            .get(b + 1)
            .map(|d| d.0)
            .unwrap_or(self.file_len);
        if end < start || end > self.file_len {
            return Err(LexiconError::Corrupt(format!("bucket {b} out of bounds")));
        }
        let mut buf = vec![0u8; (end - start) as usize];
        self.file
            .read_exact_at(&mut buf, start)
            .map_err(|_| LexiconError::Corrupt(format!("bucket {b} truncated")))?;
        let truncated = || LexiconError::Corrupt(format!("bucket {b} truncated"));
        let mut at = 0usize;
        for _ in 0..count {
            let klen = u16::from_le_bytes(buf.get(at..at + 2).ok_or_else(truncated)?.try_into().unwrap()) as usize;
            at += 2;
            let k = buf.get(at..at + klen).ok_or_else(truncated)?;
            at += klen;
            let vlen = le_u32(buf.get(at..at + 4).ok_or_else(truncated)?) as usize;
            at += 4;
            let v = buf.get(at..at + vlen).ok_or_else(truncated)?;
            at += vlen;
            let stored = le_u32(buf.get(at..at + 4).ok_or_else(truncated)?);
            at += 4;
            if k == key.as_bytes() {
                let mut crc = crc32fast::Hasher::new();
                crc.update(k);
                crc.update(v);
                if crc.finalize() != stored {
                    return Err(LexiconError::Checksum { key });
                }
                let value = String::from_utf8(v.to_vec())
                    .map_err(|_| LexiconError::Corrupt(format!("value of `{key}` is not UTF-8")))?;
                return Ok(Some(value));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fnv_matches_reference_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn bucket_count_is_power_of_two_at_least_twice_entries() {
        assert_eq!(bucket_count_for(0), 1);
        assert_eq!(bucket_count_for(3), 8);
        assert_eq!(bucket_count_for(4), 8);
        assert_eq!(bucket_count_for(90_000), 262_144);
    }

    #[test]
    fn header_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.plex");
        let entries = vec![("ab".to_string(), "(ab (subcat ((cat n))))".to_string())];
        write_table(&p, &entries).unwrap();
        let bytes = std::fs::read(&p).unwrap();
        assert_eq!(&bytes[..4], b"PLEX");
        assert_eq!(le_u32(&bytes[4..]), 1);
        assert_eq!(le_u32(&bytes[8..]), 2);
        assert_eq!(le_u32(&bytes[12..]), 1);
        // directory of two buckets, then one record
        let rec = 16 + 2 * 12;
        let b = bucket_of("ab", 2);
        let off = u64::from_le_bytes(bytes[16 + 12 * b..24 + 12 * b].try_into().unwrap());
        assert_eq!(off, rec as u64);
        assert_eq!(u16::from_le_bytes([bytes[rec], bytes[rec + 1]]), 2);
        assert_eq!(&bytes[rec + 2..rec + 4], b"ab");
        let crc_at = bytes.len() - 4;
        let mut h = crc32fast::Hasher::new();
        h.update(b"ab");
        h.update(entries[0].1.as_bytes());
        assert_eq!(le_u32(&bytes[crc_at..]), h.finalize());
    }

    #[test]
    fn detects_corrupted_records() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.plex");
        write_table(&p, &[("word".into(), "(word (subcat ((cat n))))".into())]).unwrap();
        let mut bytes = std::fs::read(&p).unwrap();
        let n = bytes.len();
        bytes[n - 6] ^= 0xff;
        std::fs::write(&p, &bytes).unwrap();
        let t = SecondaryTable::open(&p).unwrap();
        assert!(matches!(t.get("word"), Err(LexiconError::Checksum { .. })));

        std::fs::write(&p, b"NOPE").unwrap();
        assert!(SecondaryTable::open(&p).is_err());
    }
}
