//! MSRP side of the group phases: user registration, allocation and key update.

use std::collections::BTreeMap;

use rand::{CryptoRng, RngCore};

use super::messages::{GroupAllocation, KeyUpdate};
use super::{eval_points, pairwise_distinct, GroupError, MAX_PARTIES, MAX_SALT_ATTEMPTS};
use crate::crypto::{
    h2, h4, h5, instrument, lagrange_coeffs_at_zero, pk_encrypt, GroupPoint, KeyPair, Polynomial, Pseudonym, RealId,
    Scalar,
};
use crate::pool::{EntityRecord, EntityRole, Msrp, PoolError};

#[derive(Clone, Debug)]
pub struct UserProvisioning {
    pub rid: RealId,
    pub keypair: KeyPair,
    pub pid: Pseudonym,
}

#[derive(Clone, Debug)]
pub(crate) struct SessionRecord {
    /// `(PID, PK)` per party, party 0 the user.
    roster: Vec<(Pseudonym, GroupPoint)>,
    s_serv: Scalar,
    q: GroupPoint,
    updates: u32,
}

#[derive(Debug, Default)]
pub(crate) struct SessionTable {
    next_id: u64,
    sessions: BTreeMap<u64, SessionRecord>,
}

/// Public view of a session held by the MSRP.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionInfo {
    pub session_id: u64,
    pub roster: Vec<Pseudonym>,
    pub q: GroupPoint,
    pub key_digest: Scalar,
    pub updates: u32,
}

impl Msrp {
    /// Registers a user: `PK = sk·P`, `PID = H1(PK_pub) ⊕ RID`.
    pub fn register_user<R: RngCore + CryptoRng>(
        &mut self,
        rid: RealId,
        rng: &mut R,
    ) -> Result<UserProvisioning, PoolError> {
        if self.entities.contains_key(&rid) {
            return Err(PoolError::DuplicateIdentity);
        }
        let keypair = KeyPair::generate(rng);
        let pid = self.base_pid(&rid);
        self.insert_entity(
            rid,
            EntityRecord { role: EntityRole::User, keypair: keypair.clone(), pid, pool_id: None, chain: None },
        )?;
        Ok(UserProvisioning { rid, keypair, pid })
    }

    fn party_key(&self, pid: &Pseudonym, role: EntityRole) -> Result<GroupPoint, GroupError> {
        let rid = self.pid_index.get(pid).ok_or(GroupError::Unregistered)?;
        let entity = self.entities.get(rid).ok_or(GroupError::Unregistered)?;
        if entity.role != role {
            return Err(match role {
                EntityRole::User => GroupError::NotAUser,
                _ => GroupError::NotAnRn,
            });
        }
        Ok(entity.keypair.pk)
    }

    /// Forms a group of `user` and `rns` and returns one allocation per
    /// party, in roster order (user first).
    pub fn group_allocate<R: RngCore + CryptoRng>(
        &mut self,
        user: Pseudonym,
        rns: &[Pseudonym],
        rng: &mut R,
    ) -> Result<Vec<GroupAllocation>, GroupError> {
        if rns.is_empty() || rns.len() + 1 > MAX_PARTIES {
            return Err(GroupError::RosterSize);
        }
        let mut roster = Vec::with_capacity(rns.len() + 1);
        roster.push((user, self.party_key(&user, EntityRole::User)?));
        for pid in rns {
            roster.push((*pid, self.party_key(pid, EntityRole::Rn)?));
        }
        let pids: Vec<Pseudonym> = roster.iter().map(|(p, _)| *p).collect();
        {
            let mut sorted = pids.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(GroupError::DuplicateParty);
            }
        }
        let (salt, xs) = (0..MAX_SALT_ATTEMPTS)
            .map(|salt| (salt, eval_points(&pids, salt)))
            .find(|(_, xs)| pairwise_distinct(xs))
            .ok_or(GroupError::EvaluationPoints(MAX_SALT_ATTEMPTS))?;

        let binding: Vec<u8> = pids.iter().flat_map(|p| *p.as_bytes()).collect();
        let s_serv = Scalar::random(rng) + self.msk * h2(&binding);
        let degree = roster.len() - 1;
        let poly = Polynomial::random_with_constant(s_serv, degree, rng);
        let shares = poly.shares(&xs)?;
        // Self-check: the shares interpolate back to s_serv.
        let lambdas = lagrange_coeffs_at_zero(&xs)?;
        let back = lambdas.iter().zip(&shares).fold(Scalar::ZERO, |acc, (l, s)| acc + *l * s.y);
        debug_assert!(back == s_serv);
        let q = GroupPoint::mul_base(&s_serv);
        let key_digest = h4(&[&s_serv]).to_bytes();

        self.groups.next_id += 1;
        let session_id = self.groups.next_id;
        let mut out = Vec::with_capacity(roster.len());
        for ((_, pk), share) in roster.iter().zip(&shares) {
            out.push(GroupAllocation {
                session_id,
                salt,
                roster: pids.clone(),
                q,
                key_digest,
                share: pk_encrypt(pk, &share.y.to_bytes(), rng)?,
            });
        }
        self.groups.sessions.insert(session_id, SessionRecord { roster, s_serv, q, updates: 0 });
        Ok(out)
    }

    pub fn session(&self, session_id: u64) -> Option<SessionInfo> {
        let rec = self.groups.sessions.get(&session_id)?;
        Some(SessionInfo {
            session_id,
            roster: rec.roster.iter().map(|(p, _)| *p).collect(),
            q: rec.q,
            key_digest: instrument::uncounted(|| h4(&[&rec.s_serv])),
            updates: rec.updates,
        })
    }

    /// Excludes the parties at `suspicious` (roster indices, never 0), adds
    /// `replacements`, and issues `s_new = s_serv + msk·H5(Q, PK_pub)` to
    /// everyone left in the group. Returns `(PID, message)` pairs in the new
    /// roster order.
    pub fn key_update_issue<R: RngCore + CryptoRng>(
        &mut self,
        session_id: u64,
        suspicious: &[usize],
        replacements: &[Pseudonym],
        rng: &mut R,
    ) -> Result<Vec<(Pseudonym, KeyUpdate)>, GroupError> {
        if suspicious.is_empty() && replacements.is_empty() {
            return Err(GroupError::NothingToUpdate);
        }
        let incoming: Vec<(Pseudonym, GroupPoint)> = replacements
            .iter()
            .map(|pid| Ok((*pid, self.party_key(pid, EntityRole::Rn)?)))
            .collect::<Result<_, GroupError>>()?;
        let pk_pub = self.params.pk_pub;
        let msk = self.msk;
        let rec = self.groups.sessions.get_mut(&session_id).ok_or(GroupError::UnknownSession(session_id))?;
        for &i in suspicious {
            if i == 0 {
                return Err(GroupError::UserExcluded);
            }
            if i >= rec.roster.len() {
                return Err(GroupError::BadIndex(i));
            }
        }
        let mut roster: Vec<(Pseudonym, GroupPoint)> =
            rec.roster.iter().enumerate().filter(|(i, _)| !suspicious.contains(i)).map(|(_, p)| *p).collect();
        for p in incoming {
            if roster.iter().any(|(r, _)| *r == p.0) {
                return Err(GroupError::DuplicateParty);
            }
            roster.push(p);
        }
        if roster.len() < 2 {
            return Err(GroupError::EmptyGroup);
        }
        if roster.len() > MAX_PARTIES {
            return Err(GroupError::RosterSize);
        }

        let s_new = rec.s_serv + msk * h5(&rec.q, &pk_pub);
        let mut plain = s_new.to_bytes().to_vec();
        plain.extend_from_slice(&rec.q.to_bytes());
        let mut out = Vec::with_capacity(roster.len());
        for (pid, pk) in &roster {
            out.push((*pid, KeyUpdate { session_id, ciphertext: pk_encrypt(pk, &plain, rng)? }));
        }
        rec.q = GroupPoint::mul_base(&s_new);
        rec.s_serv = s_new;
        rec.roster = roster;
        rec.updates += 1;
        Ok(out)
    }

    #[cfg(test)]
    pub(crate) fn session_key(&self, session_id: u64) -> Option<Scalar> {
        self.groups.sessions.get(&session_id).map(|r| r.s_serv)
    }
}
