use rand::{CryptoRng, RngCore};

use super::messages::{AuthConfirm, InitialAuthRequest, ReauthRequest};
use super::{PoolError, RnProvisioning, RpmPublic, SystemParams};
use crate::crypto::hash::xor_into;
use crate::crypto::{curve, h3, h4, h6, GroupPoint, KeyPair, Pseudonym, RealId, Scalar};
use crate::ledger::{LedgerView, RecordKind};

/// Result of a confirmed join.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Joined {
    pub pool_id: u32,
    /// Chain index after advancing.
    pub k: u64,
    /// The pseudonym the RN will present next.
    pub next_pid: Pseudonym,
}

#[derive(Clone, Debug)]
struct Session {
    pool_id: u32,
}

/// RN-side credential chain.
///
/// `(a, pid)` is the next unconsumed position. After the first join the
/// credential also keeps the position it consumed last, because a
/// re-authentication proves the chain by revealing `H4` of that value.
#[derive(Clone, Debug)]
pub struct Credential {
    rid: RealId,
    keypair: KeyPair,
    a: Scalar,
    pid: Pseudonym,
    k: u64,
    consumed: Option<(Scalar, Pseudonym)>,
    pool_id: Option<u32>,
    home_pool: u32,
    session: Option<Session>,
    params: SystemParams,
}

impl Credential {
    pub fn new(params: SystemParams, bundle: RnProvisioning) -> Self {
        Credential {
            rid: bundle.rid,
            keypair: bundle.keypair,
            a: bundle.a0,
            pid: bundle.pid0,
            k: 0,
            consumed: None,
            pool_id: None,
            home_pool: bundle.pool_id,
            session: None,
            params,
        }
    }

    pub fn rid(&self) -> RealId {
        self.rid
    }

    pub fn keypair(&self) -> &KeyPair {
        &self.keypair
    }

    /// `(a_k, PID_k, k)`.
    pub fn current(&self) -> (Scalar, Pseudonym, u64) {
        (self.a, self.pid, self.k)
    }

    pub fn pid(&self) -> Pseudonym {
        self.pid
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Pool the RN was registered in.
    pub fn home_pool(&self) -> u32 {
        self.home_pool
    }

    /// Pool of the last confirmed join.
    pub fn pool_id(&self) -> Option<u32> {
        self.pool_id
    }

    pub fn has_open_session(&self) -> bool {
        self.session.is_some()
    }

    /// `c1 = u·(PK_RPM + H2(PID_RPM)·PK_pub)`, `c2 = H3(u·P, PID_k) ⊕ a_k`.
    pub fn initial_auth_request<R: RngCore + CryptoRng>(
        &mut self,
        target: &RpmPublic,
        rng: &mut R,
    ) -> InitialAuthRequest {
        let u = Scalar::random_nonzero(rng);
        let c1 = target.implicit_key(&self.params).mul(&u);
        let big_u = GroupPoint::mul_base(&u);
        let mut c2 = self.a.to_bytes();
        xor_into(&mut c2, &h3(&big_u, self.pid.as_bytes(), curve::SCALAR_BYTES));
        self.session = Some(Session { pool_id: target.pool_id });
        InitialAuthRequest { c1, c2, pid: self.pid }
    }

    /// Re-authentication towards another pool:
    /// `c2 = H3(w·P, PID_k) ⊕ (H4(a_k) ‖ a_{k+1})` where `k` is the last
    /// consumed position.
    pub fn reauth_request<R: RngCore + CryptoRng>(
        &mut self,
        target: &RpmPublic,
        rng: &mut R,
    ) -> Result<ReauthRequest, PoolError> {
        let (prev_a, prev_pid) = self.consumed.ok_or(PoolError::NoPriorAuthentication)?;
        let w = Scalar::random_nonzero(rng);
        let c1 = target.implicit_key(&self.params).mul(&w);
        let big_w = GroupPoint::mul_base(&w);
        let mut c2 = [0u8; 2 * curve::SCALAR_BYTES];
        c2[..curve::SCALAR_BYTES].copy_from_slice(&h4(&[&prev_a]).to_bytes());
        c2[curve::SCALAR_BYTES..].copy_from_slice(&self.a.to_bytes());
        xor_into(&mut c2, &h3(&big_w, prev_pid.as_bytes(), 2 * curve::SCALAR_BYTES));
        self.session = Some(Session { pool_id: target.pool_id });
        Ok(ReauthRequest { c1, c2, pid: prev_pid, next_pid: self.pid })
    }

    /// Checks `a·P = A` and, on success, advances
    /// `a ← H4(a, sk_RN)`, `PID ← H6(PID, a)`.
    pub fn confirm(&mut self, msg: &AuthConfirm) -> Result<Joined, PoolError> {
        let session = self.session.take().ok_or(PoolError::NoOpenSession)?;
        if GroupPoint::mul_base(&self.a) != msg.a_point {
            return Err(PoolError::RpmAuthFailed);
        }
        self.advance();
        self.pool_id = Some(session.pool_id);
        Ok(Joined { pool_id: session.pool_id, k: self.k, next_pid: self.pid })
    }

    /// Recovers from a lost confirm: if the ledger already holds `H4(a_k)`
    /// the MSRP has consumed position `k`, so advance without the RPM proof.
    /// Returns whether the credential moved.
    pub fn resync(&mut self, ledger: &LedgerView) -> bool {
        if !ledger.contains(RecordKind::CredentialDigest, &h4(&[&self.a]).to_bytes()) {
            return false;
        }
        let session = self.session.take();
        self.advance();
        if let Some(s) = session {
            self.pool_id = Some(s.pool_id);
        }
        true
    }

    fn advance(&mut self) {
        let next_a = h4(&[&self.a, &self.keypair.sk]);
        let next_pid = h6(&self.pid, &next_a);
        self.consumed = Some((self.a, self.pid));
        self.a = next_a;
        self.pid = next_pid;
        self.k += 1;
    }

    /// Drops an open session without advancing.
    pub fn abandon(&mut self) {
        self.session = None;
    }
}
