//! Bloom filter sized by the `1.44·ε·N` rule.
//!
//! A filter for `N` elements uses `L = ⌈1.44·ε·N⌉` bits and
//! `k = round(ln 2 · L / N)` index functions, giving a false-positive rate
//! near `2^-ε` at capacity. Indices come from double hashing over one
//! SHA-256 digest: `g_i(m) = h1(m) + i·h2(m) mod L`.
//!
//! Wire format (the epoch handed from the MSRP to an RPM), integers
//! little-endian:
//!
//! ```text
//! "RSBF" | version:u8 | epoch_id:u64 | capacity:u32 | epsilon:u32 | hash_count:u32 | bits
//! ```
//!
//! `bits` is `⌈L/8⌉` bytes, bit `i` at byte `i / 8`, position `i % 8` (LSB first).

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::crypto::instrument::{self, Op};

pub const MAGIC: [u8; 4] = *b"RSBF";
pub const FORMAT_VERSION: u8 = 1;
const HEADER_BYTES: usize = 4 + 1 + 8 + 4 + 4 + 4;
const INDEX_DOMAIN: &[u8] = b"rsms/bloom/v1";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BloomError {
    #[error("capacity must be at least 1")]
    ZeroCapacity,
    #[error("epsilon must be at least 1")]
    ZeroEpsilon,
    #[error("filter of {0} bits is too large")]
    TooLarge(u64),
    #[error("bad magic or version")]
    BadHeader,
    #[error("encoded filter is truncated or has trailing bytes")]
    BadLength,
    #[error("encoded parameters are inconsistent")]
    BadParameters,
}

/// Result of an insertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Insertion {
    Inserted,
    /// Inserted past capacity; the `2^-ε` bound no longer holds.
    OverCapacity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BloomFilter {
    bits: Vec<u8>,
    len_bits: usize,
    capacity: u32,
    epsilon: u32,
    hash_count: u32,
    inserted: u32,
    epoch_id: u64,
}

/// `⌈1.44·ε·N⌉`, in exact integer arithmetic.
pub fn bit_length(capacity: u32, epsilon: u32) -> u64 {
    (144 * u64::from(epsilon) * u64::from(capacity)).div_ceil(100)
}

fn optimal_hash_count(len_bits: u64, capacity: u32) -> u32 {
    let k = (std::f64::consts::LN_2 * len_bits as f64 / f64::from(capacity)).round();
    (k as u32).max(1)
}

impl BloomFilter {
    pub fn new(capacity: u32, epsilon: u32) -> Result<Self, BloomError> {
        Self::with_epoch(capacity, epsilon, 0)
    }

    pub fn with_epoch(capacity: u32, epsilon: u32, epoch_id: u64) -> Result<Self, BloomError> {
        if capacity == 0 {
            return Err(BloomError::ZeroCapacity);
        }
        if epsilon == 0 {
            return Err(BloomError::ZeroEpsilon);
        }
        let len = bit_length(capacity, epsilon);
        if len > u64::from(u32::MAX) {
            return Err(BloomError::TooLarge(len));
        }
        let len_bits = len as usize;
        Ok(BloomFilter {
            bits: vec![0u8; len_bits.div_ceil(8)],
            len_bits,
            capacity,
            epsilon,
            hash_count: optimal_hash_count(len, capacity),
            inserted: 0,
            epoch_id,
        })
    }

    pub fn len_bits(&self) -> usize {
        self.len_bits
    }
    pub fn capacity(&self) -> u32 {
        self.capacity
    }
    pub fn epsilon(&self) -> u32 {
        self.epsilon
    }
    pub fn hash_count(&self) -> u32 {
        self.hash_count
    }
    /// Insertions made through this value. A decoded filter starts at zero.
    pub fn inserted(&self) -> u32 {
        self.inserted
    }
    pub fn epoch_id(&self) -> u64 {
        self.epoch_id
    }
    pub fn is_full(&self) -> bool {
        self.inserted >= self.capacity
    }
    pub fn is_empty(&self) -> bool {
        self.inserted == 0
    }

    /// The bit indices `insert(m)` sets, in index-function order.
    pub fn positions(&self, m: &[u8]) -> Vec<usize> {
        let digest = Sha256::new().chain_update(INDEX_DOMAIN).chain_update(m).finalize();
        let h1 = u64::from_le_bytes(digest[0..8].try_into().expect("8 bytes"));
        let h2 = u64::from_le_bytes(digest[8..16].try_into().expect("8 bytes"));
        let len = self.len_bits as u64;
        (0..u64::from(self.hash_count)).map(|i| (h1.wrapping_add(i.wrapping_mul(h2)) % len) as usize).collect()
    }

    pub fn insert(&mut self, m: &[u8]) -> Insertion {
        let over = self.is_full();
        for pos in self.positions(m) {
            self.bits[pos / 8] |= 1 << (pos % 8);
        }
        self.inserted = self.inserted.saturating_add(1);
        if over {
            log::warn!("bloom epoch {} over capacity ({} > {})", self.epoch_id, self.inserted, self.capacity);
            Insertion::OverCapacity
        } else {
            Insertion::Inserted
        }
    }

    pub fn check(&self, m: &[u8]) -> bool {
        instrument::record(Op::BfCheck);
        self.positions(m).into_iter().all(|pos| self.bits[pos / 8] & (1 << (pos % 8)) != 0)
    }

    pub fn encoded_len(&self) -> usize {
        HEADER_BYTES + self.bits.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&MAGIC);
        out.push(FORMAT_VERSION);
        out.extend_from_slice(&self.epoch_id.to_le_bytes());
        out.extend_from_slice(&self.capacity.to_le_bytes());
        out.extend_from_slice(&self.epsilon.to_le_bytes());
        out.extend_from_slice(&self.hash_count.to_le_bytes());
        out.extend_from_slice(&self.bits);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, BloomError> {
        if bytes.len() < HEADER_BYTES {
            return Err(BloomError::BadLength);
        }
        if bytes[0..4] != MAGIC || bytes[4] != FORMAT_VERSION {
            return Err(BloomError::BadHeader);
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let epoch_id = u64::from_le_bytes(bytes[5..13].try_into().expect("8 bytes"));
        let capacity = u32_at(13);
        let epsilon = u32_at(17);
        let hash_count = u32_at(21);
        let mut bf = BloomFilter::with_epoch(capacity, epsilon, epoch_id).map_err(|_| BloomError::BadParameters)?;
        if hash_count != bf.hash_count {
            return Err(BloomError::BadParameters);
        }
        let body = &bytes[HEADER_BYTES..];
        if body.len() != bf.bits.len() {
            return Err(BloomError::BadLength);
        }
        // Padding bits past L must be clear.
        let spare = bf.bits.len() * 8 - bf.len_bits;
        if spare > 0 && body[body.len() - 1] >> (8 - spare) != 0 {
            return Err(BloomError::BadParameters);
        }
        bf.bits.copy_from_slice(body);
        Ok(bf)
    }
}
