//! Repeated adversarial trials with rejection counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::network::Field;
use super::scenario::{run_protocol_scenario, Scenario};
use super::world::{rn_name, World, WorldConfig};
use crate::codec::WireMessage;
use crate::group::{GroupParty, MembershipShare};
use crate::pool::{InitialAuthRequest, ReauthRequest};
use crate::GroupPoint;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub name: String,
    pub trials: u64,
    pub rejected: u64,
    /// Smallest acceptable rejection rate.
    pub threshold: f64,
}

impl AttackReport {
    pub fn rate(&self) -> f64 {
        if self.trials == 0 {
            return 1.0;
        }
        self.rejected as f64 / self.trials as f64
    }

    pub fn passed(&self) -> bool {
        self.trials > 0 && self.rate() >= self.threshold
    }
}

fn report(name: impl Into<String>, trials: u64, rejected: u64, threshold: f64) -> AttackReport {
    AttackReport { name: name.into(), trials, rejected, threshold }
}

/// One RN joined to pool 0 and then re-authenticated to pool 1; returns the
/// world and the two recorded requests.
fn recorded(seed: u64) -> (World, ChaCha20Rng, Vec<u8>, Vec<u8>) {
    let mut w = World::new(&WorldConfig { seed, pools: 2, rns_per_pool: 2, users: 0, ..WorldConfig::default() })
        .expect("world");
    let rn = rn_name(0, 0);
    assert!(w.initial_auth(&rn, 0).expect("known rn"), "honest join failed");
    let first = w.net.last_sent(crate::codec::MessageKind::InitialAuthRequest).expect("sent").bytes.clone();
    assert!(w.reauth(&rn, 1).expect("known rn"), "honest re-auth failed");
    let second = w.net.last_sent(crate::codec::MessageKind::ReauthRequest).expect("sent").bytes.clone();
    (w, ChaCha20Rng::seed_from_u64(seed ^ 0x5eed), first, second)
}

/// Re-submits a recorded initial request and a recorded re-auth request to
/// the RPMs that accepted them, `trials` times each.
pub fn replay_requests(seed: u64, trials: u64) -> Vec<AttackReport> {
    let (w, mut rng, first, second) = recorded(seed);
    let m1 = InitialAuthRequest::from_bytes(&first).expect("decode");
    let m2 = ReauthRequest::from_bytes(&second).expect("decode");
    let mut r1 = 0;
    let mut r2 = 0;
    for _ in 0..trials {
        r1 += u64::from(w.rpms[0].initial_auth_verify(&m1, &mut rng).is_err());
        r2 += u64::from(w.rpms[1].reauth_verify(&m2, &mut rng).is_err());
    }
    vec![report("replay initial-auth request", trials, r1, 1.0), report("replay re-auth request", trials, r2, 1.0)]
}

/// Replaces `c2` of a fresh initial request with random bytes. The only
/// way through is a filter false positive, so the bar is `1 - 2·2^-ε`.
pub fn tamper_c2(seed: u64, trials: u64) -> AttackReport {
    let w = World::new(&WorldConfig { seed, pools: 1, rns_per_pool: 2, users: 0, ..WorldConfig::default() })
        .expect("world");
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0xc2);
    let mut cred = w.rns[&rn_name(0, 0)].clone();
    let honest = cred.initial_auth_request(&w.rpms[0].public(), &mut rng);
    let mut rejected = 0;
    for _ in 0..trials {
        let mut m = honest.clone();
        rng.fill(&mut m.c2[..]);
        rejected += u64::from(w.rpms[0].initial_auth_verify(&m, &mut rng).is_err());
    }
    let eps = w.msrp.config().bf_epsilon;
    report("random c2 tamper", trials, rejected, 1.0 - 2.0 * 2f64.powi(-(eps as i32)))
}

/// Substitutes a random point for one share point or one `C_i` seen by one
/// verifier, for a group of `n` RNs.
pub fn substitute_membership_point(seed: u64, n: usize, trials: u64) -> AttackReport {
    let mut w = World::new(&WorldConfig { seed, pools: 1, rns_per_pool: n as u32, users: 1, ..WorldConfig::default() })
        .expect("world");
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x3e3b);
    let pids: Vec<_> = (0..n).map(|j| w.rns[&rn_name(0, j)].pid()).collect();
    let user = w.users["user-0"].clone();
    let allocs = w.msrp.group_allocate(user.pid, &pids, &mut rng).expect("allocate");
    let mut keys = vec![(user.pid, user.keypair.clone())];
    keys.extend((0..n).map(|j| {
        let c = &w.rns[&rn_name(0, j)];
        (c.pid(), c.keypair().clone())
    }));
    let mut parties: Vec<GroupParty> = allocs
        .iter()
        .zip(keys)
        .map(|(a, (pid, kp))| GroupParty::from_allocation(w.params.clone(), pid, kp, a).expect("open"))
        .collect();
    let shares: Vec<MembershipShare> = parties.iter_mut().map(|p| p.membership_share().expect("share")).collect();
    let size = parties.len();
    let mut rejected = 0;
    for _ in 0..trials {
        let victim = rng.gen_range(0..size);
        let verifier = (victim + rng.gen_range(1..size)) % size;
        let mut v = parties[verifier].clone();
        for m in shares.iter().filter(|m| m.from as usize != verifier) {
            let mut m = m.clone();
            if m.from as usize == victim {
                let forged = GroupPoint::random(&mut rng);
                if rng.gen::<bool>() {
                    m.share_point = forged;
                } else {
                    m.c_point = forged;
                }
            }
            v.receive_membership(&m).expect("receive");
        }
        rejected += u64::from(v.verify_membership().is_err());
    }
    report(format!("membership point substitution, n={n}"), trials, rejected, 1.0)
}

/// Runs the demo with each wire field corrupted once; every run must end
/// with at least one reject verdict.
pub fn tamper_fields(seed: u64) -> Vec<AttackReport> {
    Field::ALL
        .iter()
        .map(|&field| {
            let run = run_protocol_scenario(&Scenario::demo(seed, 5, 2).with_tamper(field)).expect("scenario");
            report(format!("tamper {}", field.name()), 1, u64::from(!run.all_accepted), 1.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suites_pass() {
        for r in replay_requests(1, 20) {
            assert!(r.passed(), "{r:?}");
        }
        assert!(tamper_c2(1, 200).passed());
        for n in 1..=3 {
            let r = substitute_membership_point(1, n, 50);
            assert_eq!(r.rejected, 50, "{r:?}");
        }
        for r in tamper_fields(2) {
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn empty_report_fails() {
        assert!(!report("x", 0, 0, 1.0).passed());
    }
}
