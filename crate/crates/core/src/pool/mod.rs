//! Resource-pool protocol: MSRP/RPM/RN setup, initial authentication and
//! cross-pool re-authentication.
//!
//! The RN encrypts its credential `a_k` to the RPM using the RPM's implicit
//! certificate: `c1 = u·(PK_RPM + H2(PID_RPM)·PK_pub)`. Because
//! `sk_RPM = d + msk·H2(PID_RPM)`, the RPM recovers `U = u·P` as
//! `c1·sk_RPM⁻¹` and unmasks `a_k`. Replay protection comes from the ledger
//! (consumed digests `H4(a_k)` and used pseudonyms); registration comes from
//! bloom-filter epochs handed over by the MSRP.
//!
//! The RPM answers the RN (`AuthConfirm`) without waiting for the MSRP to
//! process its `AuthReport`. A report the MSRP later finds invalid only
//! withholds the ledger writes and the registry advance; the join already
//! granted stands.

mod credential;
pub mod messages;
mod msrp;
mod rpm;

use thiserror::Error;

use crate::bloom::BloomError;
use crate::codec::CodecError;
use crate::crypto::{curve, h1, CryptoError, GroupPoint, Pseudonym};
use crate::ledger::LedgerError;

pub use credential::{Credential, Joined};
pub use messages::{AuthConfirm, AuthReport, InitialAuthRequest, ReauthRequest};
pub(crate) use msrp::EntityRecord;
pub use msrp::{msrp_setup, ChainLink, EntityRole, Msrp, MsrpConfig, ReportOutcome, RnProvisioning, RpmProvisioning};
pub use rpm::{AuthGrant, Rpm, RpmPublic};

/// Public parameters; never carries `msk`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemParams {
    pub security_bits: u32,
    pub generator: GroupPoint,
    pub pk_pub: GroupPoint,
    /// `H1(PK_pub)`, fixed once `PK_pub` is.
    pub pid_mask: Pseudonym,
}

impl SystemParams {
    pub fn new(pk_pub: GroupPoint) -> Self {
        SystemParams {
            security_bits: curve::SECURITY_BITS,
            generator: GroupPoint::generator(),
            pid_mask: h1(&pk_pub),
            pk_pub,
        }
    }

    /// `security_bits:u32 | P | PK_pub`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.security_bits.to_be_bytes().to_vec();
        out.extend_from_slice(&self.generator.to_bytes());
        out.extend_from_slice(&self.pk_pub.to_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        let expected = 4 + 2 * curve::POINT_BYTES;
        if bytes.len() != expected {
            return Err(CryptoError::Length { expected, got: bytes.len() });
        }
        let bits = u32::from_be_bytes(bytes[..4].try_into().expect("4 bytes"));
        let generator = GroupPoint::from_bytes(&bytes[4..4 + curve::POINT_BYTES])?;
        let pk_pub = GroupPoint::from_bytes(&bytes[4 + curve::POINT_BYTES..])?;
        if bits != curve::SECURITY_BITS || generator != GroupPoint::generator() || pk_pub.is_identity() {
            return Err(CryptoError::InvalidPoint);
        }
        Ok(SystemParams::new(pk_pub))
    }
}

/// Why an RPM refused an authentication request.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Reject {
    #[error("credential already consumed")]
    Replayed,
    #[error("credential not registered in any installed epoch")]
    Unregistered,
    #[error("malformed request")]
    Malformed,
    #[error("pseudonym already used")]
    PseudonymReplayed,
    #[error("no consumed credential to chain from")]
    NoChain,
    #[error("no bloom-filter epoch installed")]
    NoEpoch,
}

#[derive(Debug, Error)]
pub enum PoolError {
    #[error("unsupported security parameter {0} (supported: {supported})", supported = curve::SECURITY_BITS)]
    UnsupportedSecurity(u32),
    #[error("identity already registered")]
    DuplicateIdentity,
    #[error("unknown pool {0}")]
    UnknownPool(u32),
    #[error("unknown entity")]
    UnknownEntity,
    #[error("pool {0} has no registered credentials to hand off")]
    NothingToHandOff(u32),
    #[error("report does not match the registry")]
    InvalidReport,
    #[error("credential has not completed an authentication yet")]
    NoPriorAuthentication,
    #[error("no authentication session open")]
    NoOpenSession,
    #[error("RPM failed to prove knowledge of the credential")]
    RpmAuthFailed,
    #[error(transparent)]
    Rejected(#[from] Reject),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Crypto(#[from] CryptoError),
    #[error(transparent)]
    Bloom(#[from] BloomError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}
