//! Per-phase operation counts, message sizes and charged time.

use std::fmt;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::bloom::BloomFilter;
use crate::codec::{MessageKind, WireMessage};
use crate::crypto::instrument::{measure, uncounted, OpCount, Tally};
use crate::crypto::{curve, h4, GroupPoint, KeyPair, Pseudonym, RealId, Scalar};
use crate::group::{GroupParty, MaskedShare, MembershipShare};
use crate::ledger::Ledger;
use crate::pool::{msrp_setup, Credential, Msrp, MsrpConfig, Rpm, SystemParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolPhase {
    InitialAuth,
    Reauth,
    GroupAllocation,
    GroupMembership,
    KeyAgreement,
    KeyUpdate,
}

impl ProtocolPhase {
    pub const ALL: [ProtocolPhase; 6] = [
        ProtocolPhase::InitialAuth,
        ProtocolPhase::Reauth,
        ProtocolPhase::GroupAllocation,
        ProtocolPhase::GroupMembership,
        ProtocolPhase::KeyAgreement,
        ProtocolPhase::KeyUpdate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProtocolPhase::InitialAuth => "initial-auth",
            ProtocolPhase::Reauth => "re-auth",
            ProtocolPhase::GroupAllocation => "group-allocation",
            ProtocolPhase::GroupMembership => "group-membership",
            ProtocolPhase::KeyAgreement => "key-agreement",
            ProtocolPhase::KeyUpdate => "key-update",
        }
    }

    pub fn roles(self) -> &'static [Role] {
        match self {
            ProtocolPhase::InitialAuth | ProtocolPhase::Reauth => &[Role::Rn, Role::Rpm, Role::Msrp],
            ProtocolPhase::GroupAllocation | ProtocolPhase::KeyUpdate => &[Role::Msrp, Role::Party],
            ProtocolPhase::GroupMembership | ProtocolPhase::KeyAgreement => &[Role::Party],
        }
    }

    pub fn is_group(self) -> bool {
        !matches!(self, ProtocolPhase::InitialAuth | ProtocolPhase::Reauth)
    }
}

impl fmt::Display for ProtocolPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Rn,
    Rpm,
    Msrp,
    /// Any group party; every party does the same work.
    Party,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Rn => "rn",
            Role::Rpm => "rpm",
            Role::Msrp => "msrp",
            Role::Party => "party",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One honest execution of a phase as seen by one role.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCost {
    pub phase: ProtocolPhase,
    pub role: Role,
    /// RNs in the group (group phases), otherwise 0.
    pub n: usize,
    pub tally: Tally,
    /// Serialized bytes the role sent.
    pub bytes_sent: u64,
    /// The same, without tag bytes, session ids and party indices.
    pub payload_bytes: u64,
}

/// Bytes of framing (tag, session id, party indices, counts) in a message.
pub fn framing_bytes(kind: MessageKind) -> usize {
    match kind {
        MessageKind::InitialAuthRequest
        | MessageKind::ReauthRequest
        | MessageKind::AuthReport
        | MessageKind::AuthConfirm => 1,
        MessageKind::GroupAllocation => crate::group::HEADER_BYTES + 2,
        MessageKind::MembershipShare => crate::group::HEADER_BYTES + 1,
        MessageKind::MaskedShare => crate::group::HEADER_BYTES + 2,
        MessageKind::KeyUpdate => crate::group::HEADER_BYTES,
    }
}

#[derive(Default)]
struct Sent {
    bytes: u64,
    payload: u64,
}

impl Sent {
    fn add(&mut self, kind: MessageKind, wire: &[u8]) {
        self.bytes += wire.len() as u64;
        self.payload += (wire.len() - framing_bytes(kind)) as u64;
    }
}

/// A deployment with one pool, `rns` registered RNs and one user, with the
/// pool's filter installed. Setup work is not counted.
struct Fixture {
    rng: ChaCha20Rng,
    params: SystemParams,
    msrp: Msrp,
    rpm: Rpm,
    second: Rpm,
    rns: Vec<Credential>,
    user: (Pseudonym, KeyPair),
}

impl Fixture {
    fn new(seed: u64, rns: usize) -> Self {
        uncounted(|| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let ledger = Ledger::in_memory();
            let (params, mut msrp) =
                msrp_setup(curve::SECURITY_BITS, MsrpConfig::default(), ledger.clone(), &mut rng).expect("setup");
            let mut rpm = provision(&mut msrp, &params, &ledger, "rpm-0", &mut rng);
            let second = provision(&mut msrp, &params, &ledger, "rpm-1", &mut rng);
            let creds = (0..rns)
                .map(|j| {
                    let rid = RealId::from_name(&format!("rn-0-{j}")).expect("name");
                    Credential::new(params.clone(), msrp.register_rn(rid, rpm.pool_id(), &mut rng).expect("rn"))
                })
                .collect();
            for e in msrp.bf_handoff(rpm.pool_id()).expect("handoff") {
                rpm.install_epoch(&e).expect("epoch");
            }
            let u = msrp.register_user(RealId::from_name("user-0").expect("name"), &mut rng).expect("user");
            Fixture { rng, params, msrp, rpm, second, rns: creds, user: (u.pid, u.keypair) }
        })
    }

    fn group(&mut self, n: usize) -> Vec<GroupParty> {
        uncounted(|| {
            let pids: Vec<_> = self.rns[..n].iter().map(Credential::pid).collect();
            let allocs = self.msrp.group_allocate(self.user.0, &pids, &mut self.rng).expect("allocate");
            let mut keys = vec![self.user.clone()];
            keys.extend(self.rns[..n].iter().map(|c| (c.pid(), c.keypair().clone())));
            allocs
                .iter()
                .zip(keys)
                .map(|(a, (pid, kp))| GroupParty::from_allocation(self.params.clone(), pid, kp, a).expect("open"))
                .collect()
        })
    }
}

fn provision(msrp: &mut Msrp, params: &SystemParams, ledger: &Ledger, name: &str, rng: &mut ChaCha20Rng) -> Rpm {
    let b = msrp.register_rpm(RealId::from_name(name).expect("name"), rng).expect("rpm");
    Rpm::provision(params.clone(), b, ledger.view()).expect("provision")
}

fn membership_round(parties: &mut [GroupParty]) -> Vec<MembershipShare> {
    let shares: Vec<_> = parties.iter_mut().map(|p| p.membership_share().expect("share")).collect();
    for p in parties.iter_mut() {
        let me = p.index();
        for m in shares.iter().filter(|m| m.from as usize != me) {
            p.receive_membership(m).expect("receive");
        }
    }
    shares
}

fn keyed(parties: &mut [GroupParty]) {
    uncounted(|| {
        membership_round(parties);
        for p in parties.iter_mut() {
            p.verify_membership().expect("membership");
        }
        let masked: Vec<MaskedShare> = parties.iter_mut().flat_map(|p| p.masked_shares().expect("mask")).collect();
        for m in &masked {
            parties[m.to as usize].receive_masked(m).expect("masked");
        }
        for p in parties.iter_mut() {
            p.finish_key_agreement().expect("agree");
        }
    })
}

/// Counters and bytes for one honest run of `phase` by `role`. `n` is the
/// number of RNs in the group (ignored for pool phases; at least 1).
pub fn measure_costs(phase: ProtocolPhase, role: Role, n: usize, seed: u64) -> Option<PhaseCost> {
    if !phase.roles().contains(&role) {
        return None;
    }
    let n = n.max(1);
    // A key update needs one spare RN.
    let mut fx = Fixture::new(seed, n + 1);
    let mut sent = Sent::default();
    let mut tally = Tally::default();
    let mut add = |t: Tally| tally = tally + t;
    match phase {
        ProtocolPhase::InitialAuth | ProtocolPhase::Reauth => {
            let reauth = phase == ProtocolPhase::Reauth;
            let (target, rpm) = if reauth { (fx.second.public(), &fx.second) } else { (fx.rpm.public(), &fx.rpm) };
            let cred = &mut fx.rns[0];
            if reauth {
                uncounted(|| {
                    let r = cred.initial_auth_request(&fx.rpm.public(), &mut fx.rng);
                    let g = fx.rpm.initial_auth_verify(&r, &mut fx.rng).expect("grant");
                    fx.msrp.on_auth_report(fx.rpm.pool_id(), &g.report).expect("report");
                    cred.confirm(&g.confirm).expect("confirm");
                });
            }
            let (req_bytes, kind, t_req) = if reauth {
                let (r, t) = measure(|| cred.reauth_request(&target, &mut fx.rng).expect("request"));
                (r.to_bytes(), MessageKind::ReauthRequest, t)
            } else {
                let (r, t) = measure(|| cred.initial_auth_request(&target, &mut fx.rng));
                (r.to_bytes(), MessageKind::InitialAuthRequest, t)
            };
            let (grant, t_rpm) = measure(|| {
                if reauth {
                    rpm.reauth_verify(&WireMessage::from_bytes(&req_bytes).expect("decode"), &mut fx.rng)
                } else {
                    rpm.initial_auth_verify(&WireMessage::from_bytes(&req_bytes).expect("decode"), &mut fx.rng)
                }
                .expect("grant")
            });
            let (_, t_msrp) = measure(|| fx.msrp.on_auth_report(rpm.pool_id(), &grant.report).expect("report"));
            let (_, t_conf) = measure(|| cred.confirm(&grant.confirm).expect("confirm"));
            match role {
                Role::Rn => {
                    add(t_req + t_conf);
                    sent.add(kind, &req_bytes);
                }
                Role::Rpm => {
                    add(t_rpm);
                    sent.add(MessageKind::AuthReport, &grant.report.to_bytes());
                    sent.add(MessageKind::AuthConfirm, &grant.confirm.to_bytes());
                }
                _ => add(t_msrp),
            }
        }
        ProtocolPhase::GroupAllocation => {
            let pids: Vec<_> = fx.rns[..n].iter().map(Credential::pid).collect();
            let (allocs, t_msrp) = measure(|| fx.msrp.group_allocate(fx.user.0, &pids, &mut fx.rng).expect("allocate"));
            let c = &fx.rns[0];
            let (_, t_party) = measure(|| {
                GroupParty::from_allocation(fx.params.clone(), c.pid(), c.keypair().clone(), &allocs[1]).expect("open")
            });
            if role == Role::Msrp {
                add(t_msrp);
                for a in &allocs {
                    sent.add(MessageKind::GroupAllocation, &a.to_bytes());
                }
            } else {
                add(t_party);
            }
        }
        ProtocolPhase::GroupMembership => {
            let mut parties = fx.group(n);
            let others: Vec<MembershipShare> = uncounted(|| {
                parties.iter_mut().filter(|p| p.index() != 1).map(|p| p.membership_share().expect("share")).collect()
            });
            let me = &mut parties[1];
            let (mine, t1) = measure(|| me.membership_share().expect("share"));
            let (_, t2) = measure(|| {
                for m in &others {
                    me.receive_membership(m).expect("receive");
                }
                me.verify_membership().expect("membership");
            });
            add(t1 + t2);
            for _ in 0..n {
                sent.add(MessageKind::MembershipShare, &mine.to_bytes());
            }
        }
        ProtocolPhase::KeyAgreement => {
            let mut parties = fx.group(n);
            uncounted(|| {
                membership_round(&mut parties);
                for p in parties.iter_mut() {
                    p.verify_membership().expect("membership");
                }
            });
            let inbound: Vec<MaskedShare> = uncounted(|| {
                parties
                    .iter_mut()
                    .filter(|p| p.index() != 1)
                    .flat_map(|p| p.masked_shares().expect("mask"))
                    .filter(|m| m.to == 1)
                    .collect()
            });
            let me = &mut parties[1];
            let (mine, t1) = measure(|| me.masked_shares().expect("mask"));
            let (_, t2) = measure(|| {
                for m in &inbound {
                    me.receive_masked(m).expect("masked");
                }
                me.finish_key_agreement().expect("agree");
            });
            add(t1 + t2);
            for m in &mine {
                sent.add(MessageKind::MaskedShare, &m.to_bytes());
            }
        }
        ProtocolPhase::KeyUpdate => {
            let mut parties = fx.group(n);
            keyed(&mut parties);
            let sid = parties[0].session_id();
            let spare = fx.rns[n].pid();
            let (msgs, t_msrp) =
                measure(|| fx.msrp.key_update_issue(sid, &[n], &[spare], &mut fx.rng).expect("update"));
            let (_, t_party) = measure(|| parties[0].apply_update(&msgs[0].1).expect("apply"));
            if role == Role::Msrp {
                add(t_msrp);
                for (_, m) in &msgs {
                    sent.add(MessageKind::KeyUpdate, &m.to_bytes());
                }
            } else {
                add(t_party);
            }
        }
    }
    let n = if phase.is_group() { n } else { 0 };
    Some(PhaseCost { phase, role, n, tally, bytes_sent: sent.bytes, payload_bytes: sent.payload })
}

/// Operation counts as stated in the published analysis, for comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceCost {
    pub point_mul: u64,
    pub point_add: u64,
    pub hash: u64,
    pub inversion: u64,
    pub bf_check: u64,
    /// Bits the role sends, when stated.
    pub bits: Option<u64>,
}

/// Published per-role costs. `n` is the number of RNs (the group has `n+1`
/// parties); for the MSRP key update `n` is the number of recipients.
pub fn reference_cost(phase: ProtocolPhase, role: Role, n: u64) -> Option<ReferenceCost> {
    let r = |point_mul, point_add, hash, inversion, bf_check, bits| {
        Some(ReferenceCost { point_mul, point_add, hash, inversion, bf_check, bits })
    };
    match (phase, role) {
        (ProtocolPhase::InitialAuth, Role::Rn) => r(4, 2, 2, 0, 0, Some(833)),
        // The inversion is precomputed at provisioning.
        (ProtocolPhase::InitialAuth, Role::Rpm) => r(2, 0, 2, 0, 1, Some(1536)),
        (ProtocolPhase::Reauth, Role::Rn) => r(4, 2, 4, 0, 0, Some(833)),
        (ProtocolPhase::Reauth, Role::Rpm) => r(2, 0, 2, 0, 0, Some(1696)),
        (ProtocolPhase::GroupMembership, Role::Party) => r(2, n + 1, 0, 0, 0, Some(n * 1024)),
        (ProtocolPhase::KeyAgreement, Role::Party) => r(n, 0, 1, 0, 0, Some(n * 1024)),
        (ProtocolPhase::KeyUpdate, Role::Party) => r(2, 1, 1, 0, 0, None),
        (ProtocolPhase::KeyUpdate, Role::Msrp) => r(0, 0, 0, 0, 0, Some(n * 1024)),
        _ => None,
    }
}

/// Milliseconds charged per primitive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimingTable {
    pub point_mul: f64,
    pub mod_mul: f64,
    pub inversion: f64,
    pub hash: f64,
    pub point_add: f64,
    pub mod_exp: f64,
    pub bf_check: f64,
    /// One hybrid encryption or decryption.
    pub pk_op: f64,
}

impl Default for TimingTable {
    /// The published desktop measurements; a hybrid encryption step is
    /// charged as one point multiplication.
    fn default() -> Self {
        TimingTable {
            point_mul: 5.64,
            mod_mul: 0.006,
            inversion: 0.007,
            hash: 0.005,
            point_add: 0.027,
            mod_exp: 0.058,
            bf_check: 0.024,
            pk_op: 5.64,
        }
    }
}

impl TimingTable {
    pub const ZERO: TimingTable = TimingTable {
        point_mul: 0.0,
        mod_mul: 0.0,
        inversion: 0.0,
        hash: 0.0,
        point_add: 0.0,
        mod_exp: 0.0,
        bf_check: 0.0,
        pk_op: 0.0,
    };

    /// Charged milliseconds for `ops`. Point masks are charged as hashes.
    pub fn charge(&self, ops: &OpCount) -> f64 {
        ops.point_mul as f64 * self.point_mul
            + ops.mod_mul as f64 * self.mod_mul
            + ops.inversion as f64 * self.inversion
            + (ops.hash + ops.point_mask) as f64 * self.hash
            + ops.point_add as f64 * self.point_add
            + ops.mod_exp as f64 * self.mod_exp
            + ops.bf_check as f64 * self.bf_check
            + (ops.pk_encrypt + ops.pk_decrypt) as f64 * self.pk_op
    }

    pub fn charge_tally(&self, t: &Tally) -> f64 {
        self.charge(&(t.core + t.extra))
    }

    /// Times each primitive on this host, `iterations` runs each.
    pub fn host(iterations: u32) -> TimingTable {
        let iterations = iterations.max(1);
        let mut rng = ChaCha20Rng::seed_from_u64(0x7157);
        let s = Scalar::random_nonzero(&mut rng);
        let t = Scalar::random_nonzero(&mut rng);
        let p = GroupPoint::random(&mut rng);
        let q = GroupPoint::random(&mut rng);
        let mut bf = BloomFilter::new(1000, 10).expect("filter");
        bf.insert(&s.to_bytes());
        let kp = KeyPair::generate(&mut rng);
        let ct = crate::crypto::pk_encrypt(&kp.pk, &[7u8; 65], &mut rng).expect("encrypt");
        let time = |f: &mut dyn FnMut()| {
            let start = Instant::now();
            for _ in 0..iterations {
                f();
            }
            start.elapsed().as_secs_f64() * 1e3 / f64::from(iterations)
        };
        uncounted(|| {
            let mut sink = 0u8;
            let point_mul = time(&mut || sink ^= p.mul(&s).to_bytes()[1]);
            let mod_mul = time(&mut || sink ^= (s * t).to_bytes()[0]);
            let inversion = time(&mut || sink ^= s.invert().expect("nonzero").to_bytes()[0]);
            let hash = time(&mut || sink ^= h4(&[&s, &t]).to_bytes()[0]);
            let point_add = time(&mut || sink ^= (p + q).to_bytes()[1]);
            let mod_exp = time(&mut || {
                // Square-and-multiply over a 256-bit exponent.
                let mut acc = Scalar::from_u64(1);
                for byte in t.to_bytes() {
                    for bit in (0..8).rev() {
                        acc = acc * acc;
                        if byte >> bit & 1 == 1 {
                            acc = acc * s;
                        }
                    }
                }
                sink ^= acc.to_bytes()[0];
            });
            let bf_check = time(&mut || sink ^= u8::from(bf.check(&t.to_bytes())));
            let pk_op = time(&mut || sink ^= crate::crypto::pk_decrypt(&kp.sk, &ct).expect("decrypt")[0]);
            std::hint::black_box(sink);
            TimingTable { point_mul, mod_mul, inversion, hash, point_add, mod_exp, bf_check, pk_op }
        })
    }
}

/// Least-squares slope and intercept of `ys` against `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Bytes sent by one role of a group phase for each `n` in `ns`, with the
/// fitted per-RN slope of the payload bytes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaling {
    pub phase: ProtocolPhase,
    pub role: Role,
    pub points: Vec<(usize, u64, u64)>,
    pub payload_slope: f64,
    pub wire_slope: f64,
    /// Largest absolute residual of the payload fit.
    pub max_residual: f64,
}

pub fn byte_scaling(phase: ProtocolPhase, role: Role, ns: &[usize], seed: u64) -> Option<Scaling> {
    let mut points = Vec::new();
    for &n in ns {
        let c = measure_costs(phase, role, n, seed)?;
        points.push((n, c.bytes_sent, c.payload_bytes));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let wire: Vec<f64> = points.iter().map(|p| p.1 as f64).collect();
    let payload: Vec<f64> = points.iter().map(|p| p.2 as f64).collect();
    let (payload_slope, b) = linear_fit(&xs, &payload);
    let (wire_slope, _) = linear_fit(&xs, &wire);
    let max_residual = xs.iter().zip(&payload).map(|(x, y)| (y - (payload_slope * x + b)).abs()).fold(0.0, f64::max);
    Some(Scaling { phase, role, points, payload_slope, wire_slope, max_residual })
}

/// One message type on one link, with its serialized size and the stated
/// size where the published analysis gives one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MessageSize {
    pub kind: MessageKind,
    pub phase: ProtocolPhase,
    pub link: &'static str,
    pub bytes: u64,
    pub paper_bits: Option<u64>,
}

impl MessageSize {
    pub fn bits(&self) -> u64 {
        self.bytes * 8
    }
}

/// Sizes of every message type for a group of `n` RNs.
pub fn message_sizes(n: usize) -> Vec<MessageSize> {
    use crate::group::{allocation_bytes, KEY_UPDATE_BYTES, MASKED_SHARE_BYTES, MEMBERSHIP_SHARE_BYTES};
    use crate::pool::messages::{
        AUTH_CONFIRM_BYTES, AUTH_REPORT_BYTES, INITIAL_AUTH_REQUEST_BYTES, REAUTH_REQUEST_BYTES,
    };
    let m = |kind, phase, link, bytes: usize, paper_bits| MessageSize {
        kind,
        phase,
        link,
        bytes: bytes as u64,
        paper_bits,
    };
    use MessageKind as K;
    use ProtocolPhase as P;
    vec![
        m(K::InitialAuthRequest, P::InitialAuth, "RN->RPM", INITIAL_AUTH_REQUEST_BYTES, Some(833)),
        m(K::AuthConfirm, P::InitialAuth, "RPM->RN", AUTH_CONFIRM_BYTES, Some(512)),
        m(K::AuthReport, P::InitialAuth, "RPM->MSRP", AUTH_REPORT_BYTES, Some(1024)),
        m(K::ReauthRequest, P::Reauth, "RN->RPM", REAUTH_REQUEST_BYTES, Some(833)),
        m(K::AuthConfirm, P::Reauth, "RPM->RN", AUTH_CONFIRM_BYTES, Some(512)),
        m(K::AuthReport, P::Reauth, "RPM->MSRP", AUTH_REPORT_BYTES, Some(1184)),
        m(K::GroupAllocation, P::GroupAllocation, "MSRP->party", allocation_bytes(n + 1), None),
        m(K::MembershipShare, P::GroupMembership, "party->party", MEMBERSHIP_SHARE_BYTES, Some(1024)),
        m(K::MaskedShare, P::KeyAgreement, "party->party", MASKED_SHARE_BYTES, Some(1024)),
        m(K::KeyUpdate, P::KeyUpdate, "MSRP->party", KEY_UPDATE_BYTES, Some(1024)),
    ]
}

/// Charged milliseconds of the phases the throughput model uses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTimes {
    /// RN joining a pool: RN request and confirm plus RPM verification.
    pub join_ms: f64,
    /// Per-party allocation opening, membership and key agreement.
    pub group_setup_ms: f64,
    /// Per-party key update.
    pub key_update_ms: f64,
}

impl ProtocolTimes {
    pub const ZERO: ProtocolTimes = ProtocolTimes { join_ms: 0.0, group_setup_ms: 0.0, key_update_ms: 0.0 };

    /// Charges traced counts for a group of `n` RNs against `table`.
    pub fn from_table(table: &TimingTable, n: usize, seed: u64) -> ProtocolTimes {
        let cost = |phase, role| table.charge_tally(&measure_costs(phase, role, n, seed).expect("defined role").tally);
        ProtocolTimes {
            join_ms: cost(ProtocolPhase::InitialAuth, Role::Rn) + cost(ProtocolPhase::InitialAuth, Role::Rpm),
            group_setup_ms: cost(ProtocolPhase::GroupAllocation, Role::Party)
                + cost(ProtocolPhase::GroupMembership, Role::Party)
                + cost(ProtocolPhase::KeyAgreement, Role::Party),
            key_update_ms: cost(ProtocolPhase::KeyUpdate, Role::Party),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{KEY_UPDATE_BYTES, MASKED_SHARE_BYTES, MEMBERSHIP_SHARE_BYTES};

    fn core(phase: ProtocolPhase, role: Role, n: usize) -> OpCount {
        measure_costs(phase, role, n, 1).unwrap().tally.core
    }

    #[test]
    fn size_table_matches_encoders() {
        let sizes = message_sizes(3);
        let of = |k| sizes.iter().find(|s| s.kind == k).unwrap().bytes;
        let c = measure_costs(ProtocolPhase::InitialAuth, Role::Rn, 1, 3).unwrap();
        assert_eq!(c.bytes_sent, of(MessageKind::InitialAuthRequest));
        let c = measure_costs(ProtocolPhase::Reauth, Role::Rpm, 1, 3).unwrap();
        assert_eq!(c.bytes_sent, of(MessageKind::AuthReport) + of(MessageKind::AuthConfirm));
        let c = measure_costs(ProtocolPhase::GroupMembership, Role::Party, 3, 3).unwrap();
        assert_eq!(c.bytes_sent, 3 * of(MessageKind::MembershipShare));
        let c = measure_costs(ProtocolPhase::KeyAgreement, Role::Party, 3, 3).unwrap();
        assert_eq!(c.bytes_sent, 3 * of(MessageKind::MaskedShare));
        let c = measure_costs(ProtocolPhase::GroupAllocation, Role::Msrp, 3, 3).unwrap();
        assert_eq!(c.bytes_sent, 4 * of(MessageKind::GroupAllocation));
    }

    #[test]
    fn rpm_initial_auth_matches_reference() {
        let c = core(ProtocolPhase::InitialAuth, Role::Rpm, 0);
        assert_eq!((c.point_mul, c.bf_check, c.hash, c.inversion), (2, 1, 2, 0));
        assert_eq!(c.pk_encrypt, 1);
    }

    #[test]
    fn rn_initial_auth_trace() {
        let c = core(ProtocolPhase::InitialAuth, Role::Rn, 0);
        assert_eq!((c.point_mul, c.point_add, c.hash), (4, 1, 4));
        let r = reference_cost(ProtocolPhase::InitialAuth, Role::Rn, 0).unwrap();
        assert_eq!(r.point_add - c.point_add, 1);
    }

    #[test]
    fn reauth_trace() {
        let c = core(ProtocolPhase::Reauth, Role::Rpm, 0);
        assert_eq!((c.point_mul, c.hash, c.bf_check, c.inversion), (2, 1, 0, 0));
        let m = measure_costs(ProtocolPhase::Reauth, Role::Rn, 0, 1).unwrap();
        assert_eq!(m.bytes_sent, 138);
    }

    #[test]
    fn group_phase_counts() {
        for n in 1..=6 {
            let m = core(ProtocolPhase::GroupMembership, Role::Party, n);
            assert_eq!((m.point_mul, m.point_add), (2, n as u64 + 1), "n={n}");
            let k = core(ProtocolPhase::KeyAgreement, Role::Party, n);
            assert_eq!((k.point_mul, k.hash), (n as u64, 1), "n={n}");
            let u = core(ProtocolPhase::KeyUpdate, Role::Party, n);
            assert_eq!((u.point_mul, u.point_add, u.hash, u.pk_decrypt), (2, 1, 1, 1), "n={n}");
        }
    }

    #[test]
    fn group_bytes_are_linear() {
        let ns: Vec<usize> = (1..=8).collect();
        let m = byte_scaling(ProtocolPhase::GroupMembership, Role::Party, &ns, 3).unwrap();
        assert_eq!(m.wire_slope, MEMBERSHIP_SHARE_BYTES as f64);
        assert_eq!(m.payload_slope, 2.0 * curve::POINT_BYTES as f64);
        assert!(m.max_residual < 1e-9);
        let k = byte_scaling(ProtocolPhase::KeyAgreement, Role::Party, &ns, 3).unwrap();
        assert_eq!(k.wire_slope, MASKED_SHARE_BYTES as f64);
        assert_eq!(k.payload_slope, curve::SCALAR_BYTES as f64);
        let u = byte_scaling(ProtocolPhase::KeyUpdate, Role::Msrp, &ns, 3).unwrap();
        // n RNs, one excluded and one replacement: n+1 recipients.
        assert_eq!(u.points[0].1, 2 * KEY_UPDATE_BYTES as u64);
        assert_eq!(u.wire_slope, KEY_UPDATE_BYTES as f64);
    }

    #[test]
    fn undefined_roles_are_none() {
        assert!(measure_costs(ProtocolPhase::GroupMembership, Role::Rpm, 2, 0).is_none());
        assert!(reference_cost(ProtocolPhase::GroupAllocation, Role::Msrp, 2).is_none());
    }

    #[test]
    fn charging() {
        let t = TimingTable::default();
        let ops = OpCount { point_mul: 2, bf_check: 1, hash: 2, ..OpCount::ZERO };
        assert!((t.charge(&ops) - (2.0 * 5.64 + 0.024 + 0.010)).abs() < 1e-12);
        assert_eq!(TimingTable::ZERO.charge(&ops), 0.0);
        let p = ProtocolTimes::from_table(&t, 3, 0);
        assert!(p.group_setup_ms > p.key_update_ms && p.key_update_ms > 0.0);
        let h = TimingTable::host(3);
        assert!(h.point_mul > 0.0 && h.pk_op > 0.0);
    }

    #[test]
    fn fit_recovers_line() {
        let (m, b) = linear_fit(&[1.0, 2.0, 3.0], &[5.0, 7.0, 9.0]);
        assert!((m - 2.0).abs() < 1e-12 && (b - 3.0).abs() < 1e-12);
    }
}
