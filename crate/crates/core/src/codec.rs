//! Tagged fixed-width message framing.
//!
//! Every protocol message is one tag byte followed by its fields in protocol
//! order. Points and scalars use the widths in [`crate::crypto::curve`],
//! pseudonyms are 20 bytes, integers are big-endian.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::crypto::{curve, pke, CryptoError, GroupPoint, HybridCiphertext, Pseudonym, Scalar, PSEUDONYM_BYTES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MessageKind {
    InitialAuthRequest = 0x11,
    ReauthRequest = 0x12,
    AuthReport = 0x13,
    AuthConfirm = 0x14,
    GroupAllocation = 0x21,
    MembershipShare = 0x22,
    MaskedShare = 0x23,
    KeyUpdate = 0x24,
}

impl MessageKind {
    pub const ALL: [MessageKind; 8] = [
        MessageKind::InitialAuthRequest,
        MessageKind::ReauthRequest,
        MessageKind::AuthReport,
        MessageKind::AuthConfirm,
        MessageKind::GroupAllocation,
        MessageKind::MembershipShare,
        MessageKind::MaskedShare,
        MessageKind::KeyUpdate,
    ];

    pub fn from_tag(tag: u8) -> Option<Self> {
        MessageKind::ALL.into_iter().find(|k| *k as u8 == tag)
    }

    pub fn label(self) -> &'static str {
        match self {
            MessageKind::InitialAuthRequest => "initial-auth-request",
            MessageKind::ReauthRequest => "reauth-request",
            MessageKind::AuthReport => "auth-report",
            MessageKind::AuthConfirm => "auth-confirm",
            MessageKind::GroupAllocation => "group-allocation",
            MessageKind::MembershipShare => "membership-share",
            MessageKind::MaskedShare => "masked-share",
            MessageKind::KeyUpdate => "key-update",
        }
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("unexpected message tag {0:#04x}")]
    Tag(u8),
    #[error("message truncated")]
    Truncated,
    #[error("{0} trailing bytes")]
    Trailing(usize),
    #[error("field does not decode: {0}")]
    Field(#[from] CryptoError),
}

/// A message with a stable binary encoding.
pub trait WireMessage: Sized {
    const KIND: MessageKind;

    fn encode_body(&self, out: &mut Vec<u8>);
    fn decode_body(r: &mut Reader<'_>) -> Result<Self, CodecError>;

    fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![Self::KIND as u8];
        self.encode_body(&mut out);
        out
    }

    fn from_bytes(bytes: &[u8]) -> Result<Self, CodecError> {
        let (&tag, rest) = bytes.split_first().ok_or(CodecError::Truncated)?;
        if tag != Self::KIND as u8 {
            return Err(CodecError::Tag(tag));
        }
        let mut r = Reader::new(rest);
        let msg = Self::decode_body(&mut r)?;
        r.finish()?;
        Ok(msg)
    }
}

pub struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Reader { buf }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        if self.buf.len() < n {
            return Err(CodecError::Truncated);
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    pub fn rest(&mut self) -> &'a [u8] {
        std::mem::take(&mut self.buf)
    }

    pub fn u8(&mut self) -> Result<u8, CodecError> {
        Ok(self.take(1)?[0])
    }

    pub fn u64(&mut self) -> Result<u64, CodecError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    pub fn point(&mut self) -> Result<GroupPoint, CodecError> {
        Ok(GroupPoint::from_bytes(self.take(curve::POINT_BYTES)?)?)
    }

    pub fn scalar(&mut self) -> Result<Scalar, CodecError> {
        Ok(Scalar::from_bytes(self.take(curve::SCALAR_BYTES)?)?)
    }

    pub fn pseudonym(&mut self) -> Result<Pseudonym, CodecError> {
        Ok(Pseudonym::from_slice(self.take(PSEUDONYM_BYTES)?)?)
    }

    /// Ciphertext of a `plaintext_len`-byte message.
    pub fn ciphertext(&mut self, plaintext_len: usize) -> Result<HybridCiphertext, CodecError> {
        Ok(HybridCiphertext::from_bytes(self.take(pke::OVERHEAD_BYTES + plaintext_len)?)?)
    }

    pub fn finish(self) -> Result<(), CodecError> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(CodecError::Trailing(self.buf.len()))
        }
    }
}

/// Tag of an encoded message, if it is one of ours.
pub fn peek_kind(bytes: &[u8]) -> Option<MessageKind> {
    bytes.first().copied().and_then(MessageKind::from_tag)
}
