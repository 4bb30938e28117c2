//! Group membership authentication, session key agreement and key update
//! between a user and the RNs the MSRP allocates to it.
//!
//! The MSRP picks `s_serv = r + msk·H2(PID_1 ‖ … ‖ PID_{N+1})`, shares it
//! with a degree-`N` polynomial evaluated at `x_i = H2(PID_i)` and publishes
//! `Q = s_serv·P`. Parties prove membership by showing their Lagrange-weighted
//! share points sum to `Q`, then swap shares under pairwise Diffie–Hellman
//! masks and interpolate `s_serv`. All `N+1` shares are needed.

mod messages;
mod msrp;
mod party;
#[cfg(test)]
mod tests;
pub mod traffic;

use thiserror::Error;

use crate::codec::CodecError;
use crate::crypto::{h2, CryptoError, Pseudonym, Scalar};

pub use messages::{
    allocation_bytes, GroupAllocation, KeyUpdate, MaskedShare, MembershipShare, HEADER_BYTES, KEY_UPDATE_BYTES,
    MASKED_SHARE_BYTES, MEMBERSHIP_SHARE_BYTES, UPDATE_PLAINTEXT_BYTES,
};
pub(crate) use msrp::SessionTable;
pub use msrp::{SessionInfo, UserProvisioning};
pub use party::{GroupParty, Phase};

/// Salts tried before giving up on distinct evaluation points.
pub const MAX_SALT_ATTEMPTS: u8 = 16;
/// Largest roster a one-byte party index can address.
pub const MAX_PARTIES: usize = 255;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("pseudonym is not registered")]
    Unregistered,
    #[error("party 0 must be a registered user")]
    NotAUser,
    #[error("allocated party is not an RN")]
    NotAnRn,
    #[error("a group needs at least one RN and at most {max} parties", max = MAX_PARTIES)]
    RosterSize,
    #[error("pseudonym listed twice in the roster")]
    DuplicateParty,
    #[error("no distinct evaluation points after {0} salts")]
    EvaluationPoints(u8),
    #[error("unknown session {0}")]
    UnknownSession(u64),
    #[error("message for session {got}, expected {expected}")]
    WrongSession { expected: u64, got: u64 },
    #[error("own pseudonym is not in the roster")]
    NotInRoster,
    #[error("party index {0} out of range")]
    BadIndex(usize),
    #[error("operation not allowed in phase {0:?}")]
    Phase(Phase),
    #[error("missing message from party {0}")]
    Missing(usize),
    #[error("membership check failed")]
    MembershipFailed,
    #[error("recovered key does not match the commitment")]
    KeyMismatch,
    #[error("key update failed verification")]
    UpdateVerifyFailed,
    #[error("key update names no suspicious or replacement party")]
    NothingToUpdate,
    #[error("the user cannot be excluded")]
    UserExcluded,
    #[error("update would leave no RN in the group")]
    EmptyGroup,
    #[error("could not decrypt payload")]
    Decrypt,
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
}

/// `x_i = H2(PID_i)` for salt 0, otherwise `H2(PID_i ‖ salt)`.
pub fn eval_point(pid: &Pseudonym, salt: u8) -> Scalar {
    if salt == 0 {
        h2(pid.as_bytes())
    } else {
        let mut buf = pid.as_bytes().to_vec();
        buf.push(salt);
        h2(&buf)
    }
}

pub fn eval_points(roster: &[Pseudonym], salt: u8) -> Vec<Scalar> {
    roster.iter().map(|p| eval_point(p, salt)).collect()
}

pub(crate) fn pairwise_distinct(xs: &[Scalar]) -> bool {
    let mut seen: Vec<[u8; 32]> = xs.iter().map(Scalar::to_bytes).collect();
    seen.sort_unstable();
    seen.windows(2).all(|w| w[0] != w[1]) && xs.iter().all(|x| !x.is_zero())
}
