//! Fixed-width identifiers.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::CryptoError;

/// Width of real identities and pseudonyms (160 bits).
pub const PSEUDONYM_BYTES: usize = 20;

/// Real identity of an entity. Never appears on the wire.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RealId([u8; PSEUDONYM_BYTES]);

impl RealId {
    pub fn new(bytes: [u8; PSEUDONYM_BYTES]) -> Self {
        RealId(bytes)
    }

    /// Zero-padded ASCII name, at most 20 bytes.
    pub fn from_name(name: &str) -> Result<Self, CryptoError> {
        let b = name.as_bytes();
        if b.is_empty() || b.len() > PSEUDONYM_BYTES {
            return Err(CryptoError::Length { expected: PSEUDONYM_BYTES, got: b.len() });
        }
        let mut out = [0u8; PSEUDONYM_BYTES];
        out[..b.len()].copy_from_slice(b);
        Ok(RealId(out))
    }

    pub fn as_bytes(&self) -> &[u8; PSEUDONYM_BYTES] {
        &self.0
    }

    /// `mask ⊕ RID`.
    pub fn mask(&self, mask: &Pseudonym) -> Pseudonym {
        let mut out = self.0;
        out.iter_mut().zip(mask.0.iter()).for_each(|(o, m)| *o ^= m);
        Pseudonym(out)
    }
}

impl fmt::Debug for RealId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let end = self.0.iter().rposition(|&b| b != 0).map_or(0, |i| i + 1);
        match std::str::from_utf8(&self.0[..end]) {
            Ok(s) if s.chars().all(|c| c.is_ascii_graphic()) => write!(f, "RealId({s})"),
            _ => write!(f, "RealId({})", hex::encode(self.0)),
        }
    }
}

/// Pseudonym: an `H1`/`H6` output or an identity masked with `H1(PK_pub)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pseudonym([u8; PSEUDONYM_BYTES]);

impl Pseudonym {
    pub fn new(bytes: [u8; PSEUDONYM_BYTES]) -> Self {
        Pseudonym(bytes)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self, CryptoError> {
        let arr: [u8; PSEUDONYM_BYTES] =
            bytes.try_into().map_err(|_| CryptoError::Length { expected: PSEUDONYM_BYTES, got: bytes.len() })?;
        Ok(Pseudonym(arr))
    }

    pub fn as_bytes(&self) -> &[u8; PSEUDONYM_BYTES] {
        &self.0
    }

    /// Inverse of [`RealId::mask`].
    pub fn unmask(&self, mask: &Pseudonym) -> RealId {
        let mut out = self.0;
        out.iter_mut().zip(mask.0.iter()).for_each(|(o, m)| *o ^= m);
        RealId(out)
    }
}

impl fmt::Debug for Pseudonym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pid({})", hex::encode(&self.0[..6]))
    }
}

impl fmt::Display for Pseudonym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}
