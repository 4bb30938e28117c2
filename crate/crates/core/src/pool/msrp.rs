use std::collections::{BTreeMap, HashMap};

use rand::{CryptoRng, RngCore};

use super::messages::{AuthReport, REPORT_PLAINTEXT_BYTES};
use super::{PoolError, SystemParams};
use crate::bloom::{BloomFilter, Insertion};
use crate::crypto::{curve, h4, h6, pk_decrypt, GroupPoint, KeyPair, Pseudonym, RealId, Scalar};
use crate::ledger::{Ledger, RecordKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MsrpConfig {
    /// Bloom-filter capacity `N` per epoch.
    pub bf_capacity: u32,
    /// Bloom-filter FPR exponent `ε`.
    pub bf_epsilon: u32,
}

impl Default for MsrpConfig {
    fn default() -> Self {
        MsrpConfig { bf_capacity: 1000, bf_epsilon: 10 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntityRole {
    Rpm,
    Rn,
    User,
}

/// Credential chain position held by the registry for one RN.
#[derive(Clone, Debug)]
pub(crate) struct ChainState {
    pub(crate) a0: Scalar,
    pub(crate) pid0: Pseudonym,
    pub(crate) a: Scalar,
    pub(crate) pid: Pseudonym,
    pub(crate) k: u64,
}

#[derive(Clone, Debug)]
pub(crate) struct EntityRecord {
    pub(crate) role: EntityRole,
    pub(crate) keypair: KeyPair,
    pub(crate) pid: Pseudonym,
    pub(crate) pool_id: Option<u32>,
    pub(crate) chain: Option<ChainState>,
}

#[derive(Debug)]
struct PoolRecord {
    pending: BloomFilter,
    sealed: Vec<BloomFilter>,
    next_epoch: u64,
}

/// Secure-channel delivery to a new RPM.
#[derive(Clone, Debug)]
pub struct RpmProvisioning {
    pub pool_id: u32,
    pub keypair: KeyPair,
    pub pid: Pseudonym,
}

/// Secure-channel delivery to a new RN.
#[derive(Clone, Debug)]
pub struct RnProvisioning {
    pub rid: RealId,
    pub pool_id: u32,
    pub keypair: KeyPair,
    pub a0: Scalar,
    pub pid0: Pseudonym,
}

/// What the MSRP did with an [`AuthReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportOutcome {
    pub digest_seq: u64,
    pub pseudonym_seq: u64,
    /// Chain index the registry now holds for this RN.
    pub k: u64,
}

/// One step of a reconstructed pseudonym chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLink {
    pub k: u64,
    pub pid: Pseudonym,
    pub pid_on_ledger: bool,
    pub digest_on_ledger: bool,
}

/// The fully trusted root: holds `msk`, registers every entity, writes the ledger.
pub struct Msrp {
    pub(crate) msk: Scalar,
    pub(crate) params: SystemParams,
    config: MsrpConfig,
    pub(crate) ledger: Ledger,
    pub(crate) entities: BTreeMap<RealId, EntityRecord>,
    pub(crate) pid_index: HashMap<Pseudonym, RealId>,
    pools: BTreeMap<u32, PoolRecord>,
    next_pool_id: u32,
    pub(crate) groups: crate::group::SessionTable,
}

impl std::fmt::Debug for Msrp {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Msrp")
            .field("entities", &self.entities.len())
            .field("pools", &self.pools.len())
            .finish_non_exhaustive()
    }
}

/// Generates `msk`, `PK_pub = msk·P` and an empty registry.
pub fn msrp_setup<R: RngCore + CryptoRng>(
    security_bits: u32,
    config: MsrpConfig,
    ledger: Ledger,
    rng: &mut R,
) -> Result<(SystemParams, Msrp), PoolError> {
    if security_bits != curve::SECURITY_BITS {
        return Err(PoolError::UnsupportedSecurity(security_bits));
    }
    // Validate the filter shape once, up front.
    BloomFilter::new(config.bf_capacity, config.bf_epsilon)?;
    let msk = Scalar::random_nonzero(rng);
    let params = SystemParams::new(GroupPoint::mul_base(&msk));
    let msrp = Msrp {
        msk,
        params: params.clone(),
        config,
        ledger,
        entities: BTreeMap::new(),
        pid_index: HashMap::new(),
        pools: BTreeMap::new(),
        next_pool_id: 1,
        groups: Default::default(),
    };
    Ok((params, msrp))
}

impl Msrp {
    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn ledger(&self) -> &Ledger {
        &self.ledger
    }

    pub fn config(&self) -> MsrpConfig {
        self.config
    }

    #[cfg(test)]
    pub(crate) fn msk(&self) -> Scalar {
        self.msk
    }

    pub(crate) fn insert_entity(&mut self, rid: RealId, rec: EntityRecord) -> Result<(), PoolError> {
        if self.entities.contains_key(&rid) {
            return Err(PoolError::DuplicateIdentity);
        }
        self.pid_index.insert(rec.pid, rid);
        self.entities.insert(rid, rec);
        Ok(())
    }

    pub(crate) fn base_pid(&self, rid: &RealId) -> Pseudonym {
        rid.mask(&self.params.pid_mask)
    }

    /// Creates a pool and provisions its manager with
    /// `sk = d + msk·H2(PID)`, `PK = d·P`.
    pub fn register_rpm<R: RngCore + CryptoRng>(
        &mut self,
        rid: RealId,
        rng: &mut R,
    ) -> Result<RpmProvisioning, PoolError> {
        if self.entities.contains_key(&rid) {
            return Err(PoolError::DuplicateIdentity);
        }
        let d = Scalar::random_nonzero(rng);
        let pk = GroupPoint::mul_base(&d);
        let pid = self.base_pid(&rid);
        let sk = d + self.msk * crate::crypto::h2(pid.as_bytes());
        let keypair = KeyPair { sk, pk };
        let pool_id = self.next_pool_id;
        self.next_pool_id += 1;
        self.pools.insert(
            pool_id,
            PoolRecord {
                pending: BloomFilter::with_epoch(self.config.bf_capacity, self.config.bf_epsilon, 0)?,
                sealed: Vec::new(),
                next_epoch: 1,
            },
        );
        self.insert_entity(
            rid,
            EntityRecord { role: EntityRole::Rpm, keypair: keypair.clone(), pid, pool_id: Some(pool_id), chain: None },
        )?;
        Ok(RpmProvisioning { pool_id, keypair, pid })
    }

    /// Registers an RN in `pool_id` and inserts `a_0` into that pool's pending epoch.
    ///
    /// A pending epoch already at capacity is sealed first and queued for the
    /// next [`Msrp::bf_handoff`].
    pub fn register_rn<R: RngCore + CryptoRng>(
        &mut self,
        rid: RealId,
        pool_id: u32,
        rng: &mut R,
    ) -> Result<RnProvisioning, PoolError> {
        if self.entities.contains_key(&rid) {
            return Err(PoolError::DuplicateIdentity);
        }
        let (capacity, epsilon) = (self.config.bf_capacity, self.config.bf_epsilon);
        let pool = self.pools.get_mut(&pool_id).ok_or(PoolError::UnknownPool(pool_id))?;
        if pool.pending.is_full() {
            let fresh = BloomFilter::with_epoch(capacity, epsilon, pool.next_epoch)?;
            pool.next_epoch += 1;
            pool.sealed.push(std::mem::replace(&mut pool.pending, fresh));
        }
        let keypair = KeyPair::generate(rng);
        let a0 = Scalar::random_nonzero(rng);
        let inserted = pool.pending.insert(&a0.to_bytes());
        debug_assert_eq!(inserted, Insertion::Inserted);
        let pid0 = self.base_pid(&rid);
        self.insert_entity(
            rid,
            EntityRecord {
                role: EntityRole::Rn,
                keypair: keypair.clone(),
                pid: pid0,
                pool_id: Some(pool_id),
                chain: Some(ChainState { a0, pid0, a: a0, pid: pid0, k: 0 }),
            },
        )?;
        Ok(RnProvisioning { rid, pool_id, keypair, a0, pid0 })
    }

    /// Pending epoch of `pool_id` (not yet handed to the RPM).
    pub fn pending_filter(&self, pool_id: u32) -> Option<&BloomFilter> {
        self.pools.get(&pool_id).map(|p| &p.pending)
    }

    /// Seals the pending epoch and returns every undelivered epoch, oldest
    /// first, in wire format. The MSRP starts a fresh filter.
    pub fn bf_handoff(&mut self, pool_id: u32) -> Result<Vec<Vec<u8>>, PoolError> {
        let (capacity, epsilon) = (self.config.bf_capacity, self.config.bf_epsilon);
        let pool = self.pools.get_mut(&pool_id).ok_or(PoolError::UnknownPool(pool_id))?;
        if !pool.pending.is_empty() {
            let fresh = BloomFilter::with_epoch(capacity, epsilon, pool.next_epoch)?;
            pool.next_epoch += 1;
            pool.sealed.push(std::mem::replace(&mut pool.pending, fresh));
        }
        if pool.sealed.is_empty() {
            return Err(PoolError::NothingToHandOff(pool_id));
        }
        Ok(pool.sealed.drain(..).map(|bf| bf.to_bytes()).collect())
    }

    /// Registry position `(a_k, PID_k, k)` of an RN.
    pub fn registry_credential(&self, rid: &RealId) -> Option<(Scalar, Pseudonym, u64)> {
        let chain = self.entities.get(rid)?.chain.as_ref()?;
        Some((chain.a, chain.pid, chain.k))
    }

    pub fn role_of(&self, rid: &RealId) -> Option<EntityRole> {
        self.entities.get(rid).map(|e| e.role)
    }

    /// Processes an RPM's report of a successful authentication.
    ///
    /// Valid iff `(a, PID)` equals the registry's current tuple for that RN.
    /// Then the registry advances `a_{k+1} = H4(a_k, sk_RN)`,
    /// `PID_{k+1} = H6(PID_k, a_{k+1})` and the ledger records `H4(a_k)` and
    /// `PID_k`.
    pub fn on_auth_report(&mut self, pool_id: u32, report: &AuthReport) -> Result<ReportOutcome, PoolError> {
        if !self.pools.contains_key(&pool_id) {
            return Err(PoolError::UnknownPool(pool_id));
        }
        let plain = pk_decrypt(&self.msk, &report.ciphertext).map_err(|_| PoolError::InvalidReport)?;
        if plain.len() != REPORT_PLAINTEXT_BYTES {
            return Err(PoolError::InvalidReport);
        }
        let a = Scalar::from_bytes(&plain[..curve::SCALAR_BYTES]).map_err(|_| PoolError::InvalidReport)?;
        let pid = Pseudonym::from_slice(&plain[curve::SCALAR_BYTES..])?;

        let rid = *self.pid_index.get(&pid).ok_or_else(|| {
            log::warn!("auth report for unknown pseudonym {pid}");
            PoolError::InvalidReport
        })?;
        let entity = self.entities.get_mut(&rid).ok_or(PoolError::InvalidReport)?;
        let sk = entity.keypair.sk;
        let chain = entity.chain.as_mut().ok_or(PoolError::InvalidReport)?;
        if chain.a != a || chain.pid != pid {
            log::warn!("auth report for {pid} does not match registry position k={}", chain.k);
            return Err(PoolError::InvalidReport);
        }
        let digest = h4(&[&a]);
        let next_a = h4(&[&a, &sk]);
        let next_pid = h6(&pid, &next_a);
        chain.a = next_a;
        chain.pid = next_pid;
        chain.k += 1;
        let k = chain.k;
        entity.pool_id = Some(pool_id);
        self.pid_index.insert(next_pid, rid);

        let digest_seq = self.ledger.append(RecordKind::CredentialDigest, &digest.to_bytes(), pool_id)?;
        let pseudonym_seq = self.ledger.append(RecordKind::Pseudonym, pid.as_bytes(), pool_id)?;
        Ok(ReportOutcome { digest_seq, pseudonym_seq, k })
    }

    /// Rebuilds an RN's pseudonym chain from its registration secrets and
    /// matches each link against the ledger.
    pub fn trace(&self, rid: &RealId) -> Result<Vec<ChainLink>, PoolError> {
        let entity = self.entities.get(rid).ok_or(PoolError::UnknownEntity)?;
        let chain = entity.chain.as_ref().ok_or(PoolError::UnknownEntity)?;
        let sk = entity.keypair.sk;
        let (mut a, mut pid) = (chain.a0, chain.pid0);
        let mut links = Vec::new();
        for k in 0..=chain.k {
            links.push(ChainLink {
                k,
                pid,
                pid_on_ledger: self.ledger.contains(RecordKind::Pseudonym, pid.as_bytes()),
                digest_on_ledger: self.ledger.contains(RecordKind::CredentialDigest, &h4(&[&a]).to_bytes()),
            });
            a = h4(&[&a, &sk]);
            pid = h6(&pid, &a);
        }
        Ok(links)
    }
}
