use rand::{CryptoRng, RngCore};

use super::messages::{AuthConfirm, AuthReport, InitialAuthRequest, ReauthRequest};
use super::{PoolError, Reject, RpmProvisioning, SystemParams};
use crate::bloom::BloomFilter;
use crate::crypto::hash::xor_into;
use crate::crypto::{curve, h2, h3, h4, pk_encrypt, GroupPoint, KeyPair, Pseudonym, Scalar};
use crate::ledger::{LedgerView, RecordKind};

/// What an RN needs to address an RPM.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RpmPublic {
    pub pool_id: u32,
    pub pk: GroupPoint,
    pub pid: Pseudonym,
}

impl RpmPublic {
    /// `PK_RPM + H2(PID_RPM)·PK_pub`, the point an RN encrypts towards.
    pub fn implicit_key(&self, params: &SystemParams) -> GroupPoint {
        self.pk + params.pk_pub * h2(self.pid.as_bytes())
    }
}

/// An accepted request: the report for the MSRP and the reply for the RN.
/// They do not depend on each other and may be sent in either order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthGrant {
    pub report: AuthReport,
    pub confirm: AuthConfirm,
}

#[derive(Debug)]
pub struct Rpm {
    pool_id: u32,
    keypair: KeyPair,
    sk_inv: Scalar,
    pid: Pseudonym,
    params: SystemParams,
    /// Installed epochs, oldest first.
    epochs: Vec<BloomFilter>,
    ledger: LedgerView,
}

impl Rpm {
    pub fn provision(params: SystemParams, bundle: RpmProvisioning, ledger: LedgerView) -> Result<Self, PoolError> {
        let implicit =
            RpmPublic { pool_id: bundle.pool_id, pk: bundle.keypair.pk, pid: bundle.pid }.implicit_key(&params);
        if GroupPoint::mul_base(&bundle.keypair.sk) != implicit {
            return Err(PoolError::Crypto(crate::crypto::CryptoError::InvalidPoint));
        }
        let sk_inv = bundle.keypair.sk.invert().ok_or(PoolError::Crypto(crate::crypto::CryptoError::InvalidPoint))?;
        Ok(Rpm {
            pool_id: bundle.pool_id,
            keypair: bundle.keypair,
            sk_inv,
            pid: bundle.pid,
            params,
            epochs: Vec::new(),
            ledger,
        })
    }

    pub fn pool_id(&self) -> u32 {
        self.pool_id
    }

    pub fn public(&self) -> RpmPublic {
        RpmPublic { pool_id: self.pool_id, pk: self.keypair.pk, pid: self.pid }
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    #[cfg(test)]
    pub(crate) fn keypair_for_tests(&self) -> &KeyPair {
        &self.keypair
    }

    pub fn epochs(&self) -> &[BloomFilter] {
        &self.epochs
    }

    /// Installs one handed-off epoch in wire format.
    pub fn install_epoch(&mut self, bytes: &[u8]) -> Result<u64, PoolError> {
        let bf = BloomFilter::from_bytes(bytes)?;
        let epoch = bf.epoch_id();
        self.epochs.push(bf);
        Ok(epoch)
    }

    fn registered(&self, a: &Scalar) -> bool {
        let enc = a.to_bytes();
        self.epochs.iter().rev().any(|bf| bf.check(&enc))
    }

    /// `c1·sk⁻¹`, the sender's mask point.
    pub fn recover_mask_point(&self, c1: &GroupPoint) -> Result<GroupPoint, Reject> {
        if c1.is_identity() {
            return Err(Reject::Malformed);
        }
        Ok(c1.mul(&self.sk_inv))
    }

    fn grant<R: RngCore + CryptoRng>(&self, a: &Scalar, pid: &Pseudonym, rng: &mut R) -> Result<AuthGrant, Reject> {
        let mut plain = a.to_bytes().to_vec();
        plain.extend_from_slice(pid.as_bytes());
        let ciphertext = pk_encrypt(&self.params.pk_pub, &plain, rng).map_err(|_| Reject::Malformed)?;
        Ok(AuthGrant { report: AuthReport { ciphertext }, confirm: AuthConfirm { a_point: GroupPoint::mul_base(a) } })
    }

    /// Initial authentication: recover `a`, refuse consumed or unregistered
    /// credentials, then grant.
    pub fn initial_auth_verify<R: RngCore + CryptoRng>(
        &self,
        msg: &InitialAuthRequest,
        rng: &mut R,
    ) -> Result<AuthGrant, Reject> {
        if self.epochs.is_empty() {
            return Err(Reject::NoEpoch);
        }
        let u = self.recover_mask_point(&msg.c1)?;
        let mut a_bytes = msg.c2;
        xor_into(&mut a_bytes, &h3(&u, msg.pid.as_bytes(), curve::SCALAR_BYTES));
        let a = Scalar::from_bytes(&a_bytes).map_err(|_| Reject::Malformed)?;
        if a.is_zero() {
            return Err(Reject::Malformed);
        }
        if self.ledger.contains(RecordKind::CredentialDigest, &h4(&[&a]).to_bytes()) {
            return Err(Reject::Replayed);
        }
        if !self.registered(&a) {
            return Err(Reject::Unregistered);
        }
        self.grant(&a, &msg.pid, rng)
    }

    /// Re-authentication: recover `H4(a_k) ‖ a_{k+1}` and check the ledger
    /// only. `PID_{k+1}` must be unused and `H4(a_k)` must be a consumed
    /// credential. No filter check is made; the MSRP's registry match on
    /// the report is what binds `a_{k+1}` to the chain.
    pub fn reauth_verify<R: RngCore + CryptoRng>(&self, msg: &ReauthRequest, rng: &mut R) -> Result<AuthGrant, Reject> {
        let w = self.recover_mask_point(&msg.c1)?;
        let mut payload = msg.c2;
        xor_into(&mut payload, &h3(&w, msg.pid.as_bytes(), 2 * curve::SCALAR_BYTES));
        let (digest, next) = payload.split_at(curve::SCALAR_BYTES);
        let next_a = Scalar::from_bytes(next).map_err(|_| Reject::Malformed)?;
        if next_a.is_zero() {
            return Err(Reject::Malformed);
        }
        if self.ledger.contains(RecordKind::Pseudonym, msg.next_pid.as_bytes()) {
            return Err(Reject::PseudonymReplayed);
        }
        if !self.ledger.contains(RecordKind::CredentialDigest, digest) {
            return Err(Reject::NoChain);
        }
        self.grant(&next_a, &msg.next_pid, rng)
    }
}
