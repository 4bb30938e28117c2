use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::*;
use crate::crypto::{h5, GroupPoint, KeyPair, RealId};
use crate::ledger::Ledger;
use crate::pool::{msrp_setup, Msrp, MsrpConfig, SystemParams};

struct Fixture {
    rng: ChaCha20Rng,
    params: SystemParams,
    msrp: Msrp,
    user: (Pseudonym, KeyPair),
    rns: Vec<(Pseudonym, KeyPair)>,
}

fn fixture(seed: u64, rns: usize) -> Fixture {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (params, mut msrp) = msrp_setup(128, MsrpConfig::default(), Ledger::in_memory(), &mut rng).unwrap();
    let pool = msrp.register_rpm(RealId::from_name("rpm").unwrap(), &mut rng).unwrap().pool_id;
    let u = msrp.register_user(RealId::from_name("user").unwrap(), &mut rng).unwrap();
    let rns = (0..rns)
        .map(|i| {
            let b = msrp.register_rn(RealId::from_name(&format!("rn-{i}")).unwrap(), pool, &mut rng).unwrap();
            (b.pid0, b.keypair)
        })
        .collect();
    Fixture { rng, params, msrp, user: (u.pid, u.keypair), rns }
}

impl Fixture {
    fn allocate(&mut self, n: usize) -> Vec<GroupParty> {
        let pids: Vec<_> = self.rns[..n].iter().map(|(p, _)| *p).collect();
        let allocs = self.msrp.group_allocate(self.user.0, &pids, &mut self.rng).unwrap();
        let mut keys = vec![self.user.clone()];
        keys.extend(self.rns[..n].iter().cloned());
        allocs
            .iter()
            .zip(keys)
            .map(|(a, (pid, kp))| GroupParty::from_allocation(self.params.clone(), pid, kp, a).unwrap())
            .collect()
    }
}

fn membership(parties: &mut [GroupParty]) -> Vec<MembershipShare> {
    let shares: Vec<_> = parties.iter_mut().map(|p| p.membership_share().unwrap()).collect();
    for p in parties.iter_mut() {
        for m in &shares {
            if m.from as usize != p.index() {
                p.receive_membership(m).unwrap();
            }
        }
    }
    shares
}

fn agree(parties: &mut [GroupParty]) -> Vec<Result<Scalar, GroupError>> {
    let masked: Vec<_> = parties.iter_mut().flat_map(|p| p.masked_shares().unwrap()).collect();
    for m in &masked {
        parties[m.to as usize].receive_masked(m).unwrap();
    }
    parties.iter_mut().map(|p| p.finish_key_agreement()).collect()
}

fn keyed(f: &mut Fixture, n: usize) -> Vec<GroupParty> {
    let mut parties = f.allocate(n);
    membership(&mut parties);
    for p in parties.iter_mut() {
        p.verify_membership().unwrap();
    }
    for r in agree(&mut parties) {
        r.unwrap();
    }
    parties
}

#[test]
fn honest_runs_agree_on_committed_key() {
    for n in 1..=8 {
        let mut f = fixture(100 + n as u64, n);
        let parties = keyed(&mut f, n);
        let sid = parties[0].session_id();
        let s = f.msrp.session_key(sid).unwrap();
        for p in &parties {
            assert_eq!(p.session_key(), Some(s));
            assert_eq!(p.phase(), Phase::Keyed);
            assert_eq!(GroupPoint::mul_base(&s), p.commitment());
        }
    }
}

#[test]
fn allocation_is_bound_to_roster() {
    let mut f = fixture(1, 2);
    let pids: Vec<_> = f.rns.iter().map(|(p, _)| *p).collect();
    let allocs = f.msrp.group_allocate(f.user.0, &pids, &mut f.rng).unwrap();
    assert_eq!(allocs.len(), 3);
    // Party 1's allocation does not open under party 2's key.
    let err = GroupParty::from_allocation(f.params.clone(), f.rns[1].0, f.rns[1].1.clone(), &allocs[1]).unwrap_err();
    assert_eq!(err, GroupError::Decrypt);
    assert_eq!(f.msrp.group_allocate(f.user.0, &[], &mut f.rng).unwrap_err(), GroupError::RosterSize);
    assert_eq!(f.msrp.group_allocate(f.rns[0].0, &pids[1..], &mut f.rng).unwrap_err(), GroupError::NotAUser);
    assert_eq!(f.msrp.group_allocate(f.user.0, &[f.user.0], &mut f.rng).unwrap_err(), GroupError::NotAnRn);
    assert_eq!(
        f.msrp.group_allocate(f.user.0, &[pids[0], pids[0]], &mut f.rng).unwrap_err(),
        GroupError::DuplicateParty
    );
    let stranger = Pseudonym::new([9; 20]);
    assert_eq!(f.msrp.group_allocate(f.user.0, &[stranger], &mut f.rng).unwrap_err(), GroupError::Unregistered);
}

#[test]
fn substituted_share_point_fails_membership() {
    let mut f = fixture(2, 4);
    for victim in 0..5 {
        for forged_field in 0..2 {
            let mut parties = f.allocate(4);
            let shares = membership(&mut parties);
            let verifier = (victim + 1) % 5;
            let mut m = shares[victim].clone();
            if forged_field == 0 {
                m.share_point = GroupPoint::random(&mut f.rng);
            } else {
                m.c_point = GroupPoint::random(&mut f.rng);
            }
            parties[verifier].receive_membership(&m).unwrap();
            assert_eq!(parties[verifier].verify_membership().unwrap_err(), GroupError::MembershipFailed);
        }
    }
}

#[test]
fn tampered_masked_share_fails_agreement() {
    let mut f = fixture(3, 3);
    let mut parties = f.allocate(3);
    membership(&mut parties);
    parties.iter_mut().for_each(|p| p.verify_membership().unwrap());
    let mut masked: Vec<_> = parties.iter_mut().flat_map(|p| p.masked_shares().unwrap()).collect();
    masked[0].payload[31] ^= 1;
    let victim = masked[0].to as usize;
    for m in &masked {
        let _ = parties[m.to as usize].receive_masked(m);
    }
    assert_eq!(parties[victim].finish_key_agreement().unwrap_err(), GroupError::KeyMismatch);
}

#[test]
fn phases_are_ordered() {
    let mut f = fixture(4, 1);
    let mut parties = f.allocate(1);
    assert_eq!(parties[0].masked_shares().unwrap_err(), GroupError::Phase(Phase::Allocated));
    assert_eq!(parties[0].verify_membership().unwrap_err(), GroupError::Missing(0));
    membership(&mut parties);
    parties[0].verify_membership().unwrap();
    assert!(parties[0].membership_share().is_err());
}

#[test]
fn key_update_excludes_and_chains() {
    let mut f = fixture(5, 5);
    let mut parties = keyed(&mut f, 4);
    let sid = parties[0].session_id();
    let q0 = parties[0].commitment();
    let replacement = f.rns[4].clone();

    let msgs = f.msrp.key_update_issue(sid, &[2], &[replacement.0], &mut f.rng).unwrap();
    assert_eq!(msgs.len(), 5);
    assert!(msgs.iter().all(|(pid, _)| *pid != parties[2].roster()[2]));
    let s_new = f.msrp.session_key(sid).unwrap();
    assert_eq!(GroupPoint::mul_base(&s_new), q0 + f.params.pk_pub * h5(&q0, &f.params.pk_pub));
    let mut retained: Vec<GroupParty> = Vec::new();
    for (i, p) in parties.drain(..).enumerate() {
        if i != 2 {
            retained.push(p);
        }
    }
    for (p, (_, m)) in retained.iter_mut().zip(&msgs) {
        assert_eq!(p.apply_update(m).unwrap(), s_new);
    }
    let (_, last) = msgs.last().unwrap();
    let newcomer = GroupParty::from_update(f.params.clone(), replacement.0, replacement.1.clone(), last).unwrap();
    assert_eq!(newcomer.session_key(), Some(s_new));

    // Second update verifies against the new commitment.
    let msgs2 = f.msrp.key_update_issue(sid, &[1], &[], &mut f.rng).unwrap();
    let s2 = f.msrp.session_key(sid).unwrap();
    let p0 = &mut retained[0];
    assert_eq!(p0.apply_update(&msgs2[0].1).unwrap(), s2);
    // A stale update (first round) no longer matches the local commitment.
    assert_eq!(retained[2].apply_update(&msgs[2].1).unwrap_err(), GroupError::UpdateVerifyFailed);
}

#[test]
fn update_for_another_session_is_refused() {
    let mut f = fixture(6, 2);
    let mut a = keyed(&mut f, 2);
    let mut b = keyed(&mut f, 2);
    let sid_b = b[0].session_id();
    let msgs = f.msrp.key_update_issue(sid_b, &[1], &[], &mut f.rng).unwrap();
    assert!(matches!(a[0].apply_update(&msgs[0].1), Err(GroupError::WrongSession { .. })));
    // Same session id but a foreign commitment: verification fails.
    let mut forged = msgs[0].1.clone();
    forged.session_id = a[0].session_id();
    assert_eq!(a[0].apply_update(&forged).unwrap_err(), GroupError::UpdateVerifyFailed);
    b[0].apply_update(&msgs[0].1).unwrap();
}

#[test]
fn update_argument_errors() {
    let mut f = fixture(7, 2);
    let parties = keyed(&mut f, 2);
    let sid = parties[0].session_id();
    assert_eq!(f.msrp.key_update_issue(sid, &[], &[], &mut f.rng).unwrap_err(), GroupError::NothingToUpdate);
    assert_eq!(f.msrp.key_update_issue(sid, &[0], &[], &mut f.rng).unwrap_err(), GroupError::UserExcluded);
    assert_eq!(f.msrp.key_update_issue(sid, &[1, 2], &[], &mut f.rng).unwrap_err(), GroupError::EmptyGroup);
    assert_eq!(f.msrp.key_update_issue(sid, &[3], &[], &mut f.rng).unwrap_err(), GroupError::BadIndex(3));
    assert_eq!(f.msrp.key_update_issue(99, &[1], &[], &mut f.rng).unwrap_err(), GroupError::UnknownSession(99));
}

#[test]
fn salted_points_stay_distinct() {
    let roster: Vec<_> = (0..50u8).map(|i| Pseudonym::new([i; 20])).collect();
    for salt in 0..MAX_SALT_ATTEMPTS {
        assert!(pairwise_distinct(&eval_points(&roster, salt)));
    }
    assert_ne!(eval_point(&roster[0], 0), eval_point(&roster[0], 1));
}
