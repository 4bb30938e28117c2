//! Distributional checks: share uniformity and pseudonym unlinkability.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rsms_core::crypto::{share_generate, SmallField};
use rsms_core::sim::world::rn_name;
use rsms_core::sim::{World, WorldConfig};
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Z7 = SmallField<7>;

fn chi_square(observed: &[u64], expected: f64) -> f64 {
    observed.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum()
}

fn critical(df: usize) -> f64 {
    ChiSquared::new(df as f64).unwrap().inverse_cdf(0.999)
}

#[test]
fn any_n_shares_are_uniform_for_a_fixed_secret() {
    // Three parties, degree two: any two shares carry no information.
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let xs = [Z7::new(1), Z7::new(2), Z7::new(3)];
    let trials = 10_000;
    for secret in [0, 3, 6] {
        let mut pairs = [[0u64; 7]; 7];
        let mut singles = [0u64; 7];
        for _ in 0..trials {
            let s = share_generate(Z7::new(secret), &xs, 2, &mut rng).unwrap();
            pairs[s[0].y.value() as usize][s[2].y.value() as usize] += 1;
            singles[s[1].y.value() as usize] += 1;
        }
        let flat: Vec<u64> = pairs.iter().flatten().copied().collect();
        assert!(chi_square(&flat, trials as f64 / 49.0) < critical(48), "pairs, secret {secret}");
        assert!(chi_square(&singles, trials as f64 / 7.0) < critical(6), "single, secret {secret}");
    }
}

#[test]
fn pseudonym_chain_looks_random() {
    let mut w =
        World::new(&WorldConfig { seed: 2, pools: 2, rns_per_pool: 1, users: 0, ..WorldConfig::default() }).unwrap();
    let rn = rn_name(0, 0);
    let mut pids = vec![w.rns[&rn].pid()];
    assert!(w.initial_auth(&rn, 0).unwrap());
    pids.push(w.rns[&rn].pid());
    for i in 0..400 {
        assert!(w.reauth(&rn, (i + 1) % 2).unwrap());
        pids.push(w.rns[&rn].pid());
    }

    let mut bytes = [0u64; 256];
    for p in &pids {
        for b in p.as_bytes() {
            bytes[*b as usize] += 1;
        }
    }
    let total: u64 = bytes.iter().sum();
    assert!(chi_square(&bytes, total as f64 / 256.0) < critical(255));

    // Consecutive pseudonyms agree on about half their bits.
    let mut differing = 0u64;
    for pair in pids.windows(2) {
        differing += pair[0]
            .as_bytes()
            .iter()
            .zip(pair[1].as_bytes())
            .map(|(a, b)| u64::from((a ^ b).count_ones()))
            .sum::<u64>();
    }
    let bits = (pids.len() - 1) as f64 * 160.0;
    let z = (differing as f64 - bits / 2.0) / (bits / 4.0).sqrt();
    assert!(z.abs() < 4.0, "z = {z}");

    let unique: std::collections::HashSet<_> = pids.iter().collect();
    assert_eq!(unique.len(), pids.len());
}
