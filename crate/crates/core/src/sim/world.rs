//! A complete deployment driven step by step over a [`SimNetwork`].

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::network::{Envelope, SimNetwork};
use super::transcript::{kind_name, Event, Outcome, Reason, Transcript};
use crate::codec::{MessageKind, WireMessage};
use crate::crypto::{RealId, Scalar};
use crate::group::{traffic, GroupAllocation, GroupParty, KeyUpdate, MaskedShare, MembershipShare, UserProvisioning};
use crate::ledger::Ledger;
use crate::pool::messages::{AuthConfirm, AuthReport, InitialAuthRequest, ReauthRequest};
use crate::pool::{msrp_setup, Credential, Msrp, MsrpConfig, PoolError, Rpm, SystemParams};

pub const MSRP: &str = "msrp";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    pub seed: u64,
    pub pools: u32,
    pub rns_per_pool: u32,
    pub users: u32,
    pub bf_capacity: u32,
    pub bf_epsilon: u32,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig { seed: 0, pools: 2, rns_per_pool: 4, users: 1, bf_capacity: 1000, bf_epsilon: 10 }
    }
}

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("unknown entity {0}")]
    UnknownEntity(String),
    #[error("unknown pool index {0}")]
    UnknownPool(usize),
    #[error("unknown group index {0}")]
    UnknownGroup(usize),
    #[error("replaying {0} is not supported")]
    Unsupported(MessageKind),
    #[error("nothing of kind {0} was sent")]
    NothingToReplay(MessageKind),
    #[error("world needs at least one pool")]
    NoPools,
    #[error(transparent)]
    Pool(#[from] PoolError),
}

pub fn rpm_name(pool: usize) -> String {
    format!("rpm-{pool}")
}

pub fn rn_name(pool: usize, j: usize) -> String {
    format!("rn-{pool}-{j}")
}

pub fn user_name(i: usize) -> String {
    format!("user-{i}")
}

/// Group state as seen by the harness.
#[derive(Clone, Debug)]
pub struct GroupRun {
    pub session_id: u64,
    /// `(name, party)` in roster order.
    pub members: Vec<(String, GroupParty)>,
    /// Parties removed by a key update, holding the key they had.
    pub excluded: Vec<(String, GroupParty)>,
    next_frame: u64,
}

pub struct World {
    rng: ChaCha20Rng,
    seed: u64,
    pub params: SystemParams,
    pub msrp: Msrp,
    pub ledger: Ledger,
    pub rpms: Vec<Rpm>,
    pub rns: BTreeMap<String, Credential>,
    pub users: BTreeMap<String, UserProvisioning>,
    pub groups: Vec<Option<GroupRun>>,
    /// Session keys revealed to the adversary: `(group, owner, key)`.
    pub leaked: Vec<(usize, String, Scalar)>,
    pub net: SimNetwork,
    pub transcript: Transcript,
    step: usize,
}

impl std::fmt::Debug for World {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("World").field("seed", &self.seed).field("rpms", &self.rpms.len()).finish_non_exhaustive()
    }
}

impl World {
    /// Sets up the MSRP, one RPM per pool, the RNs and users, and hands
    /// every pool's first filter epoch to its RPM.
    pub fn new(config: &WorldConfig) -> Result<Self, WorldError> {
        if config.pools == 0 {
            return Err(WorldError::NoPools);
        }
        let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
        let ledger = Ledger::in_memory();
        let msrp_config = MsrpConfig { bf_capacity: config.bf_capacity, bf_epsilon: config.bf_epsilon };
        let (params, mut msrp) =
            msrp_setup(crate::crypto::curve::SECURITY_BITS, msrp_config, ledger.clone(), &mut rng)?;
        let mut rpms = Vec::new();
        let mut rns = BTreeMap::new();
        for pool in 0..config.pools as usize {
            let bundle = msrp.register_rpm(real_id(&rpm_name(pool)), &mut rng)?;
            let mut rpm = Rpm::provision(params.clone(), bundle, ledger.view())?;
            for j in 0..config.rns_per_pool as usize {
                let name = rn_name(pool, j);
                let b = msrp.register_rn(real_id(&name), rpm.pool_id(), &mut rng)?;
                rns.insert(name, Credential::new(params.clone(), b));
            }
            if config.rns_per_pool > 0 {
                for epoch in msrp.bf_handoff(rpm.pool_id())? {
                    rpm.install_epoch(&epoch)?;
                }
            }
            rpms.push(rpm);
        }
        let mut users = BTreeMap::new();
        for i in 0..config.users as usize {
            let name = user_name(i);
            users.insert(name.clone(), msrp.register_user(real_id(&name), &mut rng)?);
        }
        Ok(World {
            rng,
            seed: config.seed,
            params,
            msrp,
            ledger,
            rpms,
            rns,
            users,
            groups: Vec::new(),
            leaked: Vec::new(),
            net: SimNetwork::default(),
            transcript: Transcript::default(),
            step: 0,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Marks the start of a new scripted step.
    pub fn begin_step(&mut self, index: usize) {
        self.step = index;
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.transcript.events.push(Event::Note { step: self.step, text: text.into() });
    }

    fn verdict(&mut self, label: &str, subject: String, outcome: Outcome) -> bool {
        let ok = outcome.is_accept();
        self.transcript.events.push(Event::Verdict { step: self.step, label: label.into(), subject, outcome });
        ok
    }

    fn send(&mut self, from: &str, to: &str, label: &str, bytes: Vec<u8>) {
        let seq = self.net.send(from, to, label, bytes);
        let env = &self.net.sent[self.net.sent.len() - 1];
        debug_assert_eq!(env.seq, seq);
        self.transcript.events.push(Event::Message {
            step: self.step,
            seq,
            label: label.into(),
            from: from.into(),
            to: to.into(),
            kind: kind_name(env.kind()),
            bytes: hex::encode(&env.bytes),
        });
    }

    fn pool_index(&self, pool: usize) -> Result<usize, WorldError> {
        if pool < self.rpms.len() {
            Ok(pool)
        } else {
            Err(WorldError::UnknownPool(pool))
        }
    }

    fn pool_named(&self, name: &str) -> Result<usize, WorldError> {
        (0..self.rpms.len()).find(|p| rpm_name(*p) == name).ok_or_else(|| WorldError::UnknownEntity(name.into()))
    }

    fn credential(&mut self, rn: &str) -> Result<&mut Credential, WorldError> {
        self.rns.get_mut(rn).ok_or_else(|| WorldError::UnknownEntity(rn.into()))
    }

    /// RPM side of an authentication request already queued for `rpm`.
    fn rpm_handle_request(&mut self, pool: usize, label: &str) -> Option<String> {
        let rpm_name = rpm_name(pool);
        let Some(env) = self.net.recv(&rpm_name) else {
            self.verdict(label, format!("{rpm_name} receives request"), Outcome::reject("dropped"));
            return None;
        };
        let requester = env.from.clone();
        let grant = match env.kind() {
            Some(MessageKind::InitialAuthRequest) => InitialAuthRequest::from_bytes(&env.bytes)
                .map_err(|_| crate::pool::Reject::Malformed)
                .and_then(|m| self.rpms[pool].initial_auth_verify(&m, &mut self.rng)),
            Some(MessageKind::ReauthRequest) => ReauthRequest::from_bytes(&env.bytes)
                .map_err(|_| crate::pool::Reject::Malformed)
                .and_then(|m| self.rpms[pool].reauth_verify(&m, &mut self.rng)),
            _ => Err(crate::pool::Reject::Malformed),
        };
        let subject = format!("{rpm_name} authenticates {requester}");
        match grant {
            Ok(g) => {
                self.verdict(label, subject, Outcome::Accept);
                self.send(&rpm_name, MSRP, &format!("{label} report"), g.report.to_bytes());
                self.send(&rpm_name, &requester, &format!("{label} confirm"), g.confirm.to_bytes());
                Some(requester)
            }
            Err(r) => {
                self.verdict(label, subject, Outcome::Reject(r.reason()));
                None
            }
        }
    }

    fn msrp_handle_report(&mut self, pool: usize, label: &str) -> bool {
        let Some(env) = self.net.recv(MSRP) else {
            return self.verdict(label, "msrp records join".into(), Outcome::reject("dropped"));
        };
        let pool_id = self.rpms[pool].pool_id();
        let outcome = match AuthReport::from_bytes(&env.bytes)
            .map_err(PoolError::from)
            .and_then(|r| self.msrp.on_auth_report(pool_id, &r))
        {
            Ok(o) => {
                self.note(format!("ledger seq {} and {} written, chain at k={}", o.digest_seq, o.pseudonym_seq, o.k));
                Outcome::Accept
            }
            Err(e) => Outcome::Reject(e.reason()),
        };
        self.verdict(label, format!("msrp records report from {}", env.from), outcome)
    }

    fn rn_handle_confirm(&mut self, rn: &str, label: &str) -> bool {
        let Some(env) = self.net.recv(rn) else {
            return self.verdict(label, format!("{rn} authenticates rpm"), Outcome::reject("dropped"));
        };
        let from = env.from.clone();
        let result = AuthConfirm::from_bytes(&env.bytes)
            .map_err(PoolError::from)
            .and_then(|m| self.rns.get_mut(rn).expect("checked by caller").confirm(&m));
        let outcome = match result {
            Ok(j) => {
                self.note(format!("{rn} joined pool id {} at k={}", j.pool_id, j.k));
                Outcome::Accept
            }
            Err(e) => Outcome::Reject(e.reason()),
        };
        self.verdict(label, format!("{rn} authenticates {from}"), outcome)
    }

    fn finish_auth(&mut self, rn: &str, pool: usize, label: &str) -> bool {
        let Some(requester) = self.rpm_handle_request(pool, label) else {
            if let Ok(c) = self.credential(rn) {
                c.abandon();
            }
            return false;
        };
        let recorded = self.msrp_handle_report(pool, label);
        if requester != rn {
            return false;
        }
        let confirmed = self.rn_handle_confirm(rn, label);
        recorded && confirmed
    }

    /// Initial authentication of `rn` into `pool`. Returns whether every
    /// verdict accepted.
    pub fn initial_auth(&mut self, rn: &str, pool: usize) -> Result<bool, WorldError> {
        let pool = self.pool_index(pool)?;
        let target = self.rpms[pool].public();
        let req = {
            let rng = &mut self.rng;
            let cred = self.rns.get_mut(rn).ok_or_else(|| WorldError::UnknownEntity(rn.into()))?;
            cred.initial_auth_request(&target, rng)
        };
        let label = "initial-auth";
        self.send(rn, &rpm_name(pool), &format!("{label} request"), req.to_bytes());
        Ok(self.finish_auth(rn, pool, label))
    }

    /// Re-authentication of `rn` into `pool`.
    pub fn reauth(&mut self, rn: &str, pool: usize) -> Result<bool, WorldError> {
        let pool = self.pool_index(pool)?;
        let target = self.rpms[pool].public();
        let label = "re-auth";
        let req = {
            let rng = &mut self.rng;
            let cred = self.rns.get_mut(rn).ok_or_else(|| WorldError::UnknownEntity(rn.into()))?;
            cred.reauth_request(&target, rng)
        };
        match req {
            Ok(req) => {
                self.send(rn, &rpm_name(pool), &format!("{label} request"), req.to_bytes());
                Ok(self.finish_auth(rn, pool, label))
            }
            Err(e) => Ok(self.verdict(label, format!("{rn} builds request"), Outcome::Reject(e.reason()))),
        }
    }

    /// `rn` checks the ledger for a join whose confirm it never saw.
    pub fn resync(&mut self, rn: &str) -> Result<bool, WorldError> {
        let view = self.ledger.view();
        let moved = self.credential(rn)?.resync(&view);
        self.note(if moved {
            format!("{rn} found its position consumed on the ledger and advanced")
        } else {
            format!("{rn} is in sync")
        });
        Ok(moved)
    }

    /// Registers the pending filter of `pool` with its RPM.
    pub fn handoff(&mut self, pool: usize) -> Result<usize, WorldError> {
        let pool = self.pool_index(pool)?;
        let epochs = self.msrp.bf_handoff(self.rpms[pool].pool_id())?;
        for e in &epochs {
            self.rpms[pool].install_epoch(e)?;
        }
        self.note(format!("{} epoch(s) handed to {}", epochs.len(), rpm_name(pool)));
        Ok(epochs.len())
    }

    /// Registers a new RN in `pool` (setup channel, not the network).
    pub fn register_rn(&mut self, name: &str, pool: usize) -> Result<(), WorldError> {
        let pool = self.pool_index(pool)?;
        let b = self.msrp.register_rn(real_id(name), self.rpms[pool].pool_id(), &mut self.rng)?;
        self.rns.insert(name.into(), Credential::new(self.params.clone(), b));
        Ok(())
    }

    /// Re-injects the last sent message of `kind` to its original receiver
    /// and lets the receiver process it.
    pub fn replay(&mut self, kind: MessageKind) -> Result<bool, WorldError> {
        let env: Envelope = self.net.last_sent(kind).cloned().ok_or(WorldError::NothingToReplay(kind))?;
        let label = "replay";
        self.net.inject(env.clone());
        self.note(format!("adversary replays #{} ({}) to {}", env.seq, kind, env.to));
        match kind {
            MessageKind::InitialAuthRequest | MessageKind::ReauthRequest => {
                let pool = self.pool_named(&env.to)?;
                // An accepted replay is an attack success: report it as a reject.
                match self.rpm_handle_request(pool, label) {
                    Some(_) => {
                        let _ = self.net.recv(MSRP);
                        let _ = self.net.recv(&env.from);
                        Ok(self.verdict(label, "replay refused".into(), Outcome::reject("replay-accepted")))
                    }
                    None => Ok(self.verdict(label, "replay refused".into(), Outcome::Accept)),
                }
            }
            MessageKind::AuthReport => {
                let pool = self.pool_named(&env.from)?;
                let recorded = self.msrp_handle_report(pool, label);
                let outcome = if recorded { Outcome::reject("replay-accepted") } else { Outcome::Accept };
                Ok(self.verdict(label, "replay refused".into(), outcome))
            }
            MessageKind::AuthConfirm => {
                self.credential(&env.to)?;
                let confirmed = self.rn_handle_confirm(&env.to.clone(), label);
                let outcome = if confirmed { Outcome::reject("replay-accepted") } else { Outcome::Accept };
                Ok(self.verdict(label, "replay refused".into(), outcome))
            }
            other => Err(WorldError::Unsupported(other)),
        }
    }

    fn party_keys(&self, name: &str) -> Result<(crate::crypto::Pseudonym, crate::crypto::KeyPair), WorldError> {
        if let Some(u) = self.users.get(name) {
            return Ok((u.pid, u.keypair.clone()));
        }
        if let Some(c) = self.rns.get(name) {
            return Ok((c.pid(), c.keypair().clone()));
        }
        Err(WorldError::UnknownEntity(name.into()))
    }

    /// Allocation, membership authentication and key agreement for `user`
    /// and `rns`. Returns the group index (also on failure, as `None`
    /// state) and whether every verdict accepted.
    pub fn form_group(&mut self, user: &str, rns: &[String]) -> Result<(usize, bool), WorldError> {
        let index = self.groups.len();
        let (user_pid, _) = self.party_keys(user)?;
        let mut names = vec![user.to_string()];
        let mut pids = Vec::new();
        for rn in rns {
            pids.push(self.party_keys(rn)?.0);
            names.push(rn.clone());
        }
        let label = "group-alloc";
        let allocs = match self.msrp.group_allocate(user_pid, &pids, &mut self.rng) {
            Ok(a) => a,
            Err(e) => {
                self.groups.push(None);
                let ok = self.verdict(label, format!("msrp allocates group {index}"), Outcome::Reject(e.reason()));
                return Ok((index, ok));
            }
        };
        let session_id = allocs[0].session_id;
        self.note(format!("group {index} is session {session_id} with {} parties", names.len()));
        for (name, a) in names.iter().zip(&allocs) {
            self.send(MSRP, name, label, a.to_bytes());
        }
        let mut ok = true;
        let mut members = Vec::new();
        for name in &names {
            let (pid, kp) = self.party_keys(name)?;
            let opened = match self.net.recv(name) {
                None => Err(crate::group::GroupError::Missing(0)),
                Some(env) => GroupAllocation::from_bytes(&env.bytes)
                    .map_err(Into::into)
                    .and_then(|a| GroupParty::from_allocation(self.params.clone(), pid, kp, &a)),
            };
            match opened {
                Ok(p) => members.push((name.clone(), p)),
                Err(e) => {
                    ok &= self.verdict(label, format!("{name} opens allocation"), Outcome::Reject(e.reason()));
                }
            }
        }
        if members.len() != names.len() {
            self.groups.push(None);
            return Ok((index, false));
        }

        // Membership authentication.
        let label = "group-membership";
        for i in 0..members.len() {
            let msg = members[i].1.membership_share().expect("fresh party");
            for j in 0..members.len() {
                if j != i {
                    let (from, to) = (members[i].0.clone(), members[j].0.clone());
                    self.send(&from, &to, label, msg.to_bytes());
                }
            }
        }
        for (name, party) in members.iter_mut() {
            while let Some(env) = self.net.recv(name) {
                if let Err(e) = MembershipShare::from_bytes(&env.bytes)
                    .map_err(Into::into)
                    .and_then(|m| party.receive_membership(&m))
                {
                    ok &= self.verdict(
                        label,
                        format!("{name} reads share from {}", env.from),
                        Outcome::Reject(e.reason()),
                    );
                }
            }
            let outcome = match party.verify_membership() {
                Ok(()) => Outcome::Accept,
                Err(e) => Outcome::Reject(e.reason()),
            };
            ok &= self.verdict(label, format!("{name} verifies sum of C_i = Q"), outcome);
        }

        // Key agreement.
        let label = "group-key-agreement";
        if ok {
            for i in 0..members.len() {
                let msgs = members[i].1.masked_shares().expect("membership verified");
                for m in msgs {
                    let (from, to) = (members[i].0.clone(), members[m.to as usize].0.clone());
                    self.send(&from, &to, label, m.to_bytes());
                }
            }
            for (name, party) in members.iter_mut() {
                while let Some(env) = self.net.recv(name) {
                    if let Err(e) =
                        MaskedShare::from_bytes(&env.bytes).map_err(Into::into).and_then(|m| party.receive_masked(&m))
                    {
                        ok &= self.verdict(
                            label,
                            format!("{name} unmasks share from {}", env.from),
                            Outcome::Reject(e.reason()),
                        );
                    }
                }
                let outcome = match party.finish_key_agreement() {
                    Ok(_) => Outcome::Accept,
                    Err(e) => Outcome::Reject(e.reason()),
                };
                ok &= self.verdict(label, format!("{name} derives s_serv"), outcome);
            }
        }
        self.groups.push(Some(GroupRun { session_id, members, excluded: Vec::new(), next_frame: 0 }));
        Ok((index, ok))
    }

    /// `Ok(false)` (with a reject verdict) when the group exists but never
    /// formed.
    fn formed(&mut self, group: usize, label: &str) -> Result<bool, WorldError> {
        match self.groups.get(group) {
            None => Err(WorldError::UnknownGroup(group)),
            Some(Some(_)) => Ok(true),
            Some(None) => Ok(self.verdict(label, format!("group {group}"), Outcome::reject("group-not-formed"))),
        }
    }

    fn group_mut(&mut self, group: usize) -> Result<&mut GroupRun, WorldError> {
        self.groups.get_mut(group).and_then(Option::as_mut).ok_or(WorldError::UnknownGroup(group))
    }

    /// Key update excluding roster positions `exclude` and adding `replace`.
    pub fn key_update(&mut self, group: usize, exclude: &[usize], replace: &[String]) -> Result<bool, WorldError> {
        if !self.formed(group, "group-key-update")? {
            return Ok(false);
        }
        let session_id = self.group_mut(group)?.session_id;
        let mut replacement_pids = Vec::new();
        for r in replace {
            replacement_pids.push(self.party_keys(r)?.0);
        }
        let label = "group-key-update";
        let msgs = match self.msrp.key_update_issue(session_id, exclude, &replacement_pids, &mut self.rng) {
            Ok(m) => m,
            Err(e) => {
                return Ok(self.verdict(label, format!("msrp updates group {group}"), Outcome::Reject(e.reason())))
            }
        };
        let run = self.groups[group].take().expect("checked above");
        let mut retained = Vec::new();
        let mut excluded = run.excluded;
        for (i, m) in run.members.into_iter().enumerate() {
            if exclude.contains(&i) {
                excluded.push(m);
            } else {
                retained.push(m);
            }
        }
        let mut names: Vec<String> = retained.iter().map(|(n, _)| n.clone()).collect();
        names.extend(replace.iter().cloned());
        for (name, (_, m)) in names.iter().zip(&msgs) {
            self.send(MSRP, name, label, m.to_bytes());
        }
        let mut ok = true;
        let mut members = Vec::new();
        let mut retained = retained.into_iter();
        for name in &names {
            let existing = retained.next();
            let Some(env) = self.net.recv(name) else {
                ok &= self.verdict(label, format!("{name} applies update"), Outcome::reject("dropped"));
                if let Some(p) = existing {
                    members.push(p);
                }
                continue;
            };
            let msg = KeyUpdate::from_bytes(&env.bytes).map_err(crate::group::GroupError::from);
            let applied = match existing {
                Some((n, mut party)) => {
                    let r = msg.and_then(|m| party.apply_update(&m)).map(|_| ());
                    members.push((n, party));
                    r
                }
                None => {
                    let (pid, kp) = self.party_keys(name)?;
                    msg.and_then(|m| GroupParty::from_update(self.params.clone(), pid, kp, &m)).map(|p| {
                        members.push((name.clone(), p));
                    })
                }
            };
            let outcome = match applied {
                Ok(()) => Outcome::Accept,
                Err(e) => Outcome::Reject(e.reason()),
            };
            ok &= self.verdict(label, format!("{name} verifies s_new·P = Q + H5(Q, PK_pub)·PK_pub"), outcome);
        }
        self.groups[group] = Some(GroupRun { session_id, members, excluded, next_frame: run.next_frame });
        Ok(ok)
    }

    /// Reveals the current session key of `party` (by name) to the adversary.
    pub fn corrupt(&mut self, group: usize, party: &str) -> Result<(), WorldError> {
        let run = self.group_mut(group)?;
        let key = run
            .members
            .iter()
            .chain(run.excluded.iter())
            .find(|(n, _)| n == party)
            .and_then(|(_, p)| p.session_key())
            .ok_or_else(|| WorldError::UnknownEntity(party.into()))?;
        self.leaked.push((group, party.into(), key));
        self.note(format!("adversary learns the session key held by {party}"));
        Ok(())
    }

    /// The first member seals `frames` frames under the current key. Every
    /// member must read them; every excluded party and leaked key must not.
    pub fn traffic(&mut self, group: usize, frames: u32) -> Result<bool, WorldError> {
        if !self.formed(group, "group-traffic")? {
            return Ok(false);
        }
        let run = self.group_mut(group)?;
        let sid = run.session_id;
        let Some(key) = run.members[0].1.session_key() else {
            return Ok(self.verdict("group-traffic", format!("group {group}"), Outcome::reject("no-session-key")));
        };
        let start = run.next_frame;
        run.next_frame += u64::from(frames);
        let sealed: Vec<(u64, Vec<u8>)> = (start..start + u64::from(frames))
            .map(|c| (c, traffic::seal(&key, sid, c, format!("frame {c}").as_bytes())))
            .collect();
        let run = self.groups[group].as_ref().expect("checked");
        let mut checks = Vec::new();
        for (name, party) in &run.members {
            let k = party.session_key();
            let read = sealed.iter().all(|(c, f)| k.is_some_and(|k| traffic::open(&k, sid, *c, f).is_ok()));
            checks.push((
                format!("{name} reads group traffic"),
                if read { Outcome::Accept } else { Outcome::reject("cannot-read") },
            ));
        }
        let outsiders = run
            .excluded
            .iter()
            .filter_map(|(n, p)| p.session_key().map(|k| (format!("excluded {n}"), k)))
            .chain(
                self.leaked
                    .iter()
                    .filter(|(g, _, _)| *g == group)
                    .map(|(_, n, k)| (format!("adversary with {n}'s leaked key"), *k)),
            )
            .collect::<Vec<_>>();
        for (who, k) in outsiders {
            let locked_out = sealed.iter().all(|(c, f)| traffic::open(&k, sid, *c, f).is_err());
            let readable = key == k;
            let outcome = if locked_out && !readable { Outcome::Accept } else { Outcome::reject("read-traffic") };
            checks.push((format!("{who} locked out"), outcome));
        }
        let mut ok = true;
        for (subject, outcome) in checks {
            ok &= self.verdict("group-traffic", subject, outcome);
        }
        Ok(ok)
    }
}

fn real_id(name: &str) -> RealId {
    RealId::from_name(name).expect("harness names are 1-20 bytes")
}
