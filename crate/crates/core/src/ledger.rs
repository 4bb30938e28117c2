//! Append-only record store shared by every RPM.
//!
//! One logical ledger with serialized appends stands in for the blockchain.
//! Only the MSRP holds a [`Ledger`] it can append to; RPMs receive a
//! [`LedgerView`], which can only query.
//!
//! File backend layout, one record after another, integers little-endian:
//!
//! ```text
//! len:u32 | kind:u8 | pool_id:u32 | seq:u64 | value:[u8; W]
//! ```
//!
//! where `len` counts the bytes after itself and `W` is fixed per kind
//! (32 for credential digests, 20 for pseudonyms). A torn record at the tail
//! (crash mid-write) is discarded on open; it was never acknowledged.

use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::Path;
use std::sync::{Arc, RwLock};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::crypto::{curve, PSEUDONYM_BYTES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RecordKind {
    /// `H4(a_k)` of a consumed credential.
    CredentialDigest = 1,
    /// A pseudonym that has been used.
    Pseudonym = 2,
}

impl RecordKind {
    pub fn width(self) -> usize {
        match self {
            RecordKind::CredentialDigest => curve::SCALAR_BYTES,
            RecordKind::Pseudonym => PSEUDONYM_BYTES,
        }
    }

    fn from_byte(b: u8) -> Option<Self> {
        match b {
            1 => Some(RecordKind::CredentialDigest),
            2 => Some(RecordKind::Pseudonym),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("{kind:?} values are {expected} bytes, got {got}")]
    Width { kind: RecordKind, expected: usize, got: usize },
    #[error("corrupt ledger file at offset {0}")]
    Corrupt(u64),
    #[error("ledger i/o: {0}")]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerRecord {
    pub kind: RecordKind,
    pub value: Vec<u8>,
    pub pool_id: u32,
    pub seq: u64,
    /// Logical clock: one tick per append, so it tracks `seq`.
    pub timestamp: u64,
}

impl LedgerRecord {
    fn encode(&self) -> Vec<u8> {
        let body_len = 1 + 4 + 8 + self.value.len();
        let mut out = Vec::with_capacity(4 + body_len);
        out.extend_from_slice(&(body_len as u32).to_le_bytes());
        out.push(self.kind as u8);
        out.extend_from_slice(&self.pool_id.to_le_bytes());
        out.extend_from_slice(&self.seq.to_le_bytes());
        out.extend_from_slice(&self.value);
        out
    }
}

#[derive(Default)]
struct Inner {
    records: Vec<LedgerRecord>,
    index: HashSet<(RecordKind, Vec<u8>)>,
    file: Option<File>,
}

/// The writable ledger. Cloning shares the same store.
#[derive(Clone, Default)]
pub struct Ledger {
    inner: Arc<RwLock<Inner>>,
}

impl std::fmt::Debug for Ledger {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Ledger").field("len", &self.len()).finish()
    }
}

impl Ledger {
    pub fn in_memory() -> Self {
        Ledger::default()
    }

    /// Opens (or creates) a file-backed ledger and replays its records.
    pub fn open_file(path: impl AsRef<Path>) -> Result<Self, LedgerError> {
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(path)?;
        let mut raw = Vec::new();
        file.seek(SeekFrom::Start(0))?;
        file.read_to_end(&mut raw)?;

        let mut inner = Inner::default();
        let mut off = 0usize;
        while raw.len() - off >= 4 {
            let body_len = u32::from_le_bytes(raw[off..off + 4].try_into().expect("4 bytes")) as usize;
            let Some(body) = raw.get(off + 4..off + 4 + body_len) else { break };
            if body_len < 13 {
                return Err(LedgerError::Corrupt(off as u64));
            }
            let kind = RecordKind::from_byte(body[0]).ok_or(LedgerError::Corrupt(off as u64))?;
            let value = body[13..].to_vec();
            if value.len() != kind.width() {
                return Err(LedgerError::Corrupt(off as u64));
            }
            let seq = u64::from_le_bytes(body[5..13].try_into().expect("8 bytes"));
            if seq != inner.records.len() as u64 {
                return Err(LedgerError::Corrupt(off as u64));
            }
            let rec = LedgerRecord {
                kind,
                pool_id: u32::from_le_bytes(body[1..5].try_into().expect("4 bytes")),
                seq,
                timestamp: seq,
                value,
            };
            inner.index.insert((rec.kind, rec.value.clone()));
            inner.records.push(rec);
            off += 4 + body_len;
        }
        if off < raw.len() {
            log::warn!("discarding {} torn bytes at ledger tail", raw.len() - off);
            file.set_len(off as u64)?;
        }
        inner.file = Some(file);
        Ok(Ledger { inner: Arc::new(RwLock::new(inner)) })
    }

    /// Appends a record; for the file backend it is synced before returning.
    pub fn append(&self, kind: RecordKind, value: &[u8], pool_id: u32) -> Result<u64, LedgerError> {
        if value.len() != kind.width() {
            return Err(LedgerError::Width { kind, expected: kind.width(), got: value.len() });
        }
        let mut inner = self.inner.write().expect("ledger lock poisoned");
        let seq = inner.records.len() as u64;
        let rec = LedgerRecord { kind, value: value.to_vec(), pool_id, seq, timestamp: seq };
        if let Some(file) = inner.file.as_mut() {
            file.write_all(&rec.encode())?;
            file.sync_data()?;
        }
        inner.index.insert((kind, rec.value.clone()));
        inner.records.push(rec);
        Ok(seq)
    }

    pub fn contains(&self, kind: RecordKind, value: &[u8]) -> bool {
        let inner = self.inner.read().expect("ledger lock poisoned");
        inner.index.contains(&(kind, value.to_vec()))
    }

    pub fn len(&self) -> usize {
        self.inner.read().expect("ledger lock poisoned").records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn records(&self) -> Vec<LedgerRecord> {
        self.inner.read().expect("ledger lock poisoned").records.clone()
    }

    /// SHA-256 over every record's encoding, in order.
    pub fn digest(&self) -> [u8; 32] {
        let inner = self.inner.read().expect("ledger lock poisoned");
        let mut h = Sha256::new();
        for rec in &inner.records {
            h.update(rec.encode());
        }
        h.finalize().into()
    }

    pub fn view(&self) -> LedgerView {
        LedgerView { ledger: self.clone() }
    }
}

/// Query-only handle given to RPMs.
#[derive(Clone, Debug)]
pub struct LedgerView {
    ledger: Ledger,
}

impl LedgerView {
    pub fn contains(&self, kind: RecordKind, value: &[u8]) -> bool {
        self.ledger.contains(kind, value)
    }

    pub fn len(&self) -> usize {
        self.ledger.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ledger.is_empty()
    }
}
