//! Wire messages for the group phases.
//!
//! Every group message starts with `tag | session_id:u64`. Per-party
//! messages then carry the sender (and receiver) index as one byte each.
//!
//! | message           | body after header                                   |
//! |-------------------|-----------------------------------------------------|
//! | `GroupAllocation` | salt, n, PID × n, Q, H4(s_serv), Enc_PK_i(f(x_i))   |
//! | `MembershipShare` | from, f(x_i)·P, C_i                                 |
//! | `MaskedShare`     | from, to, mask(f(x_i)f(x_j)·P) ⊕ f(x_i)             |
//! | `KeyUpdate`       | Enc_PK_i(s_new ‖ Q)                                 |

use crate::codec::{CodecError, MessageKind, Reader, WireMessage};
use crate::crypto::{curve, pke, GroupPoint, HybridCiphertext, Pseudonym, PSEUDONYM_BYTES};

/// `tag | session_id`.
pub const HEADER_BYTES: usize = 1 + 8;
/// Plaintext of a [`KeyUpdate`]: `s_new ‖ Q`.
pub const UPDATE_PLAINTEXT_BYTES: usize = curve::SCALAR_BYTES + curve::POINT_BYTES;

pub const MEMBERSHIP_SHARE_BYTES: usize = HEADER_BYTES + 1 + 2 * curve::POINT_BYTES;
pub const MASKED_SHARE_BYTES: usize = HEADER_BYTES + 2 + curve::SCALAR_BYTES;
pub const KEY_UPDATE_BYTES: usize = HEADER_BYTES + pke::OVERHEAD_BYTES + UPDATE_PLAINTEXT_BYTES;

/// Encoded size of a [`GroupAllocation`] for a roster of `parties`.
pub const fn allocation_bytes(parties: usize) -> usize {
    HEADER_BYTES
        + 2
        + parties * PSEUDONYM_BYTES
        + curve::POINT_BYTES
        + curve::SCALAR_BYTES
        + pke::OVERHEAD_BYTES
        + curve::SCALAR_BYTES
}

/// MSRP → party `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAllocation {
    pub session_id: u64,
    /// Evaluation-point salt; 0 means `x_i = H2(PID_i)`.
    pub salt: u8,
    /// Party 0 is the user.
    pub roster: Vec<Pseudonym>,
    pub q: GroupPoint,
    pub key_digest: [u8; curve::SCALAR_BYTES],
    pub share: HybridCiphertext,
}

/// Party `from` → every other party: `f(x_i)·P` and `C_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MembershipShare {
    pub session_id: u64,
    pub from: u8,
    pub share_point: GroupPoint,
    pub c_point: GroupPoint,
}

/// Party `from` → party `to`: the sender's share under a pairwise mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskedShare {
    pub session_id: u64,
    pub from: u8,
    pub to: u8,
    pub payload: [u8; curve::SCALAR_BYTES],
}

/// MSRP → retained or replacement member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyUpdate {
    pub session_id: u64,
    pub ciphertext: HybridCiphertext,
}

impl WireMessage for GroupAllocation {
    const KIND: MessageKind = MessageKind::GroupAllocation;

    fn encode_body(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.session_id.to_be_bytes());
        out.push(self.salt);
        out.push(u8::try_from(self.roster.len()).expect("roster fits in one byte"));
        for pid in &self.roster {
            out.extend_from_slice(pid.as_bytes());
        }
        out.extend_from_slice(&self.q.to_bytes());
        out.extend_from_slice(&self.key_digest);
        out.extend_from_slice(&self.share.to_bytes());
    }

    fn decode_body(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        let session_id = r.u64()?;
        let salt = r.u8()?;
        let n = r.u8()? as usize;
        let roster = (0..n).map(|_| r.pseudonym()).collect::<Result<_, _>>()?;
        Ok(GroupAllocation {
            session_id,
            salt,
            roster,
            q: r.point()?,
            key_digest: r.take(curve::SCALAR_BYTES)?.try_into().expect("scalar width"),
            share: r.ciphertext(curve::SCALAR_BYTES)?,
        })
    }
}

impl WireMessage for MembershipShare {
    const KIND: MessageKind = MessageKind::MembershipShare;

    fn encode_body(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.session_id.to_be_bytes());
        out.push(self.from);
        out.extend_from_slice(&self.share_point.to_bytes());
        out.extend_from_slice(&self.c_point.to_bytes());
    }

    fn decode_body(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        Ok(MembershipShare { session_id: r.u64()?, from: r.u8()?, share_point: r.point()?, c_point: r.point()? })
    }
}

impl WireMessage for MaskedShare {
    const KIND: MessageKind = MessageKind::MaskedShare;

    fn encode_body(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.session_id.to_be_bytes());
        out.push(self.from);
        out.push(self.to);
        out.extend_from_slice(&self.payload);
    }

    fn decode_body(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        Ok(MaskedShare {
            session_id: r.u64()?,
            from: r.u8()?,
            to: r.u8()?,
            payload: r.take(curve::SCALAR_BYTES)?.try_into().expect("scalar width"),
        })
    }
}

impl WireMessage for KeyUpdate {
    const KIND: MessageKind = MessageKind::KeyUpdate;

    fn encode_body(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.session_id.to_be_bytes());
        out.extend_from_slice(&self.ciphertext.to_bytes());
    }

    fn decode_body(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        Ok(KeyUpdate { session_id: r.u64()?, ciphertext: r.ciphertext(UPDATE_PLAINTEXT_BYTES)? })
    }
}
