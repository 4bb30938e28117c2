//! Minimal authenticated channel keyed from a group session key.
//!
//! Only here to show who can and cannot read group traffic before and after
//! a key update; not a transport.

use chacha20poly1305::aead::{Aead, KeyInit, Payload};
use chacha20poly1305::{ChaCha20Poly1305, Key, Nonce};
use hkdf::Hkdf;
use sha2::Sha256;

use crate::crypto::{CryptoError, Scalar};

const INFO: &[u8] = b"rsms/traffic/v1";

fn cipher(key: &Scalar, session_id: u64) -> ChaCha20Poly1305 {
    let hk = Hkdf::<Sha256>::new(Some(&session_id.to_be_bytes()), &key.to_bytes());
    let mut okm = [0u8; 32];
    hk.expand(INFO, &mut okm).expect("32 bytes is a valid HKDF length");
    ChaCha20Poly1305::new(Key::from_slice(&okm))
}

fn nonce(counter: u64) -> Nonce {
    let mut n = [0u8; 12];
    n[4..].copy_from_slice(&counter.to_be_bytes());
    *Nonce::from_slice(&n)
}

/// Encrypts one frame. `counter` must not repeat under the same key.
pub fn seal(key: &Scalar, session_id: u64, counter: u64, plaintext: &[u8]) -> Vec<u8> {
    let aad = counter.to_be_bytes();
    cipher(key, session_id)
        .encrypt(&nonce(counter), Payload { msg: plaintext, aad: &aad })
        .expect("chacha20poly1305 encryption does not fail for in-memory buffers")
}

pub fn open(key: &Scalar, session_id: u64, counter: u64, frame: &[u8]) -> Result<Vec<u8>, CryptoError> {
    let aad = counter.to_be_bytes();
    cipher(key, session_id)
        .decrypt(&nonce(counter), Payload { msg: frame, aad: &aad })
        .map_err(|_| CryptoError::DecryptionFailed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn roundtrip_and_wrong_key() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let k = Scalar::random_nonzero(&mut rng);
        let other = Scalar::random_nonzero(&mut rng);
        let f = seal(&k, 1, 0, b"frame");
        assert_eq!(open(&k, 1, 0, &f).unwrap(), b"frame");
        assert!(open(&other, 1, 0, &f).is_err());
        assert!(open(&k, 2, 0, &f).is_err());
        assert!(open(&k, 1, 1, &f).is_err());
    }
}
