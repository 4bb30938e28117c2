use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rsms_core::codec::{MessageKind, WireMessage};
use rsms_core::crypto::{h5, RealId};
use rsms_core::group::traffic;
use rsms_core::pool::Reject;
use rsms_core::sim::world::{rn_name, GroupRun};
use rsms_core::sim::{run_protocol_scenario, Scenario, Step, World, WorldConfig};
use rsms_core::GroupPoint;

fn world(seed: u64, rns: u32) -> World {
    World::new(&WorldConfig { seed, pools: 2, rns_per_pool: rns, users: 1, ..WorldConfig::default() }).unwrap()
}

fn group(w: &World, g: usize) -> &GroupRun {
    w.groups[g].as_ref().unwrap()
}

#[test]
fn honest_runs_share_one_committed_key() {
    for seed in 0..40 {
        let run = run_protocol_scenario(&Scenario::demo(seed, 5, 1 + (seed as usize % 4))).unwrap();
        assert!(run.all_accepted, "seed {seed}\n{}", run.transcript.render());
        let g = group(&run.world, 0);
        let key = g.members[0].1.session_key().unwrap();
        for (_, p) in &g.members {
            assert_eq!(p.session_key(), Some(key));
            assert_eq!(GroupPoint::mul_base(&key), p.commitment());
        }
    }
}

#[test]
fn excluded_party_is_locked_out_and_replacement_verifies() {
    let mut w = world(21, 6);
    for j in 0..6 {
        assert!(w.initial_auth(&rn_name(0, j), 0).unwrap());
    }
    let rns: Vec<String> = (0..4).map(|j| rn_name(0, j)).collect();
    let (g, ok) = w.form_group("user-0", &rns).unwrap();
    assert!(ok);
    let sid = group(&w, g).session_id;
    let q_old = group(&w, g).members[0].1.commitment();
    let old_key = group(&w, g).members[0].1.session_key().unwrap();
    let before = traffic::seal(&old_key, sid, 0, b"before the update");

    assert!(w.key_update(g, &[2], &[rn_name(0, 4)]).unwrap());
    let run = group(&w, g);
    let new_key = run.members[0].1.session_key().unwrap();
    let q_new = run.members[0].1.commitment();
    assert_eq!(q_new, q_old + w.params.pk_pub * h5(&q_old, &w.params.pk_pub));
    assert_eq!(GroupPoint::mul_base(&new_key), q_new);
    let newcomer = &run.members.iter().find(|(n, _)| n == "rn-0-4").unwrap().1;
    assert_eq!(newcomer.session_key(), Some(new_key));
    // Backward: the newcomer cannot read what was sent before it joined.
    assert!(traffic::open(&new_key, sid, 0, &before).is_err());
    // Forward: the excluded party reads nothing sent afterwards.
    let (name, excluded) = &run.excluded[0];
    // Roster slot 0 is the user, so slot 2 is the second RN.
    assert_eq!(name, "rn-0-1");
    let stale = excluded.session_key().unwrap();
    for c in 1..=1000u64 {
        let frame = traffic::seal(&new_key, sid, c, &c.to_be_bytes());
        assert!(traffic::open(&stale, sid, c, &frame).is_err());
        assert_eq!(traffic::open(&new_key, sid, c, &frame).unwrap(), c.to_be_bytes());
    }

    // A second update chains from the first commitment.
    assert!(w.key_update(g, &[1], &[rn_name(0, 5)]).unwrap());
    let q2 = group(&w, g).members[0].1.commitment();
    assert_eq!(q2, q_new + w.params.pk_pub * h5(&q_new, &w.params.pk_pub));
    assert!(w.traffic(g, 16).unwrap());
}

#[test]
fn no_real_identity_on_the_wire() {
    let run = run_protocol_scenario(&Scenario::demo(8, 6, 3)).unwrap();
    let names: Vec<String> =
        run.world.rns.keys().cloned().chain(["user-0".into(), "rpm-0".into(), "rpm-1".into()]).collect();
    for env in &run.world.net.sent {
        for name in &names {
            let rid = RealId::from_name(name).unwrap();
            assert!(!env.bytes.windows(rid.as_bytes().len()).any(|w| w == rid.as_bytes()), "{name} in #{}", env.seq);
        }
    }
}

#[test]
fn byte_counters_are_conserved() {
    let mut s = Scenario::demo(10, 5, 2);
    s.steps.push(Step::Replay { kind: MessageKind::InitialAuthRequest });
    let run = run_protocol_scenario(&s).unwrap();
    let net = &run.world.net;
    let sent: u64 = net.sent.iter().filter(|e| !e.injected).map(|e| e.bytes.len() as u64).sum();
    assert_eq!(net.bytes_by_label().values().sum::<u64>(), net.bytes_total());
    assert_eq!(net.bytes_by_kind().values().sum::<u64>(), net.bytes_total());
    assert_eq!(sent, net.bytes_total());
}

#[test]
fn recorded_requests_are_never_accepted_twice() {
    let mut w = world(30, 3);
    let mut rng = ChaCha20Rng::seed_from_u64(30);
    let target = w.rpms[0].public();
    let other = w.rpms[1].public();
    let cred = w.rns.get_mut("rn-0-0").unwrap();
    let first = cred.initial_auth_request(&target, &mut rng);
    let grant = w.rpms[0].initial_auth_verify(&first, &mut rng).unwrap();
    w.msrp.on_auth_report(w.rpms[0].pool_id(), &grant.report).unwrap();
    let cred = w.rns.get_mut("rn-0-0").unwrap();
    cred.confirm(&grant.confirm).unwrap();
    let re = cred.reauth_request(&other, &mut rng).unwrap();
    let g2 = w.rpms[1].reauth_verify(&re, &mut rng).unwrap();
    w.msrp.on_auth_report(w.rpms[1].pool_id(), &g2.report).unwrap();
    for _ in 0..200 {
        let replay = InitialOrRe::decode(&first.to_bytes(), &re.to_bytes());
        assert_eq!(w.rpms[0].initial_auth_verify(&replay.0, &mut rng).unwrap_err(), Reject::Replayed);
        assert_eq!(w.rpms[1].reauth_verify(&replay.1, &mut rng).unwrap_err(), Reject::PseudonymReplayed);
    }
}

struct InitialOrRe(rsms_core::pool::InitialAuthRequest, rsms_core::pool::ReauthRequest);

impl InitialOrRe {
    fn decode(a: &[u8], b: &[u8]) -> Self {
        InitialOrRe(WireMessage::from_bytes(a).unwrap(), WireMessage::from_bytes(b).unwrap())
    }
}

#[test]
fn random_c2_is_rejected_except_for_filter_false_positives() {
    let w = world(40, 2);
    let mut rng = ChaCha20Rng::seed_from_u64(40);
    let mut cred = w.rns["rn-0-0"].clone();
    let honest = cred.initial_auth_request(&w.rpms[0].public(), &mut rng);
    let trials = 2000;
    let mut accepted = 0;
    for _ in 0..trials {
        let mut m = honest.clone();
        rng.fill(&mut m.c2[..]);
        match w.rpms[0].initial_auth_verify(&m, &mut rng) {
            Ok(_) => accepted += 1,
            Err(r) => assert!(matches!(r, Reject::Unregistered | Reject::Malformed), "{r:?}"),
        }
    }
    // Residual acceptance comes only from the filter's false positives.
    assert!(f64::from(accepted) / f64::from(trials) <= 2.0 * 2f64.powi(-10) * 3.0);
}
