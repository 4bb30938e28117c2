//! Hybrid public-key encryption (`Enc_PK`).
//!
//! Ephemeral ECDH on the protocol curve, HKDF-SHA256 to a one-time key, then
//! ChaCha20-Poly1305. The key is never reused, so the nonce is fixed at zero.
//! The ephemeral point is bound as associated data.

use chacha20poly1305::aead::AeadInPlace;
use chacha20poly1305::{ChaCha20Poly1305, Key, KeyInit, Nonce, Tag};
use hkdf::Hkdf;
use rand::{CryptoRng, RngCore};
use sha2::Sha256;

use super::group::{curve, GroupPoint, Scalar};
use super::instrument::{self, Op};
use super::CryptoError;

pub const TAG_BYTES: usize = 16;
/// Bytes a ciphertext adds on top of its plaintext.
pub const OVERHEAD_BYTES: usize = curve::POINT_BYTES + TAG_BYTES;

const KDF_SALT: &[u8] = b"rsms/pke/v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HybridCiphertext {
    pub ephemeral: GroupPoint,
    pub body: Vec<u8>,
    pub tag: [u8; TAG_BYTES],
}

impl HybridCiphertext {
    pub fn encoded_len(&self) -> usize {
        OVERHEAD_BYTES + self.body.len()
    }

    /// `ephemeral || body || tag`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&self.ephemeral.to_bytes());
        out.extend_from_slice(&self.body);
        out.extend_from_slice(&self.tag);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.len() <= OVERHEAD_BYTES {
            return Err(CryptoError::Length { expected: OVERHEAD_BYTES + 1, got: bytes.len() });
        }
        let (eph, rest) = bytes.split_at(curve::POINT_BYTES);
        let (body, tag) = rest.split_at(rest.len() - TAG_BYTES);
        Ok(HybridCiphertext {
            ephemeral: GroupPoint::from_bytes(eph)?,
            body: body.to_vec(),
            tag: tag.try_into().expect("tag width"),
        })
    }
}

fn derive_cipher(shared: &GroupPoint, ephemeral: &GroupPoint, recipient: &GroupPoint) -> ChaCha20Poly1305 {
    let hk = Hkdf::<Sha256>::new(Some(KDF_SALT), &shared.to_bytes());
    let mut info = [0u8; 2 * curve::POINT_BYTES];
    info[..curve::POINT_BYTES].copy_from_slice(&ephemeral.to_bytes());
    info[curve::POINT_BYTES..].copy_from_slice(&recipient.to_bytes());
    let mut key = [0u8; 32];
    hk.expand(&info, &mut key).expect("32 bytes is a valid HKDF length");
    ChaCha20Poly1305::new(Key::from_slice(&key))
}

pub fn pk_encrypt<R: RngCore + CryptoRng>(
    pk: &GroupPoint,
    m: &[u8],
    rng: &mut R,
) -> Result<HybridCiphertext, CryptoError> {
    if m.is_empty() {
        return Err(CryptoError::EmptyPlaintext);
    }
    if pk.is_identity() {
        return Err(CryptoError::InvalidPoint);
    }
    instrument::record(Op::PkEncrypt);
    instrument::uncounted(|| {
        let r = Scalar::random_nonzero(rng);
        let ephemeral = GroupPoint::mul_base(&r);
        let shared = pk.mul(&r);
        let cipher = derive_cipher(&shared, &ephemeral, pk);
        let mut body = m.to_vec();
        let tag = cipher
            .encrypt_in_place_detached(Nonce::from_slice(&[0u8; 12]), &ephemeral.to_bytes(), &mut body)
            .map_err(|_| CryptoError::Aead)?;
        Ok(HybridCiphertext { ephemeral, body, tag: tag.into() })
    })
}

pub fn pk_decrypt(sk: &Scalar, c: &HybridCiphertext) -> Result<Vec<u8>, CryptoError> {
    instrument::record(Op::PkDecrypt);
    if c.ephemeral.is_identity() || c.body.is_empty() {
        return Err(CryptoError::DecryptionFailed);
    }
    instrument::uncounted(|| {
        let recipient = GroupPoint::mul_base(sk);
        let shared = c.ephemeral.mul(sk);
        let cipher = derive_cipher(&shared, &c.ephemeral, &recipient);
        let mut body = c.body.clone();
        cipher
            .decrypt_in_place_detached(
                Nonce::from_slice(&[0u8; 12]),
                &c.ephemeral.to_bytes(),
                &mut body,
                Tag::from_slice(&c.tag),
            )
            .map_err(|_| CryptoError::DecryptionFailed)?;
        Ok(body)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::KeyPair;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn roundtrip_and_randomized() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let kp = KeyPair::generate(&mut rng);
        let c1 = pk_encrypt(&kp.pk, b"resource node", &mut rng).unwrap();
        let c2 = pk_encrypt(&kp.pk, b"resource node", &mut rng).unwrap();
        assert_ne!(c1, c2);
        assert_eq!(pk_decrypt(&kp.sk, &c1).unwrap(), b"resource node");
        let parsed = HybridCiphertext::from_bytes(&c1.to_bytes()).unwrap();
        assert_eq!(parsed, c1);
    }

    #[test]
    fn preconditions() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let kp = KeyPair::generate(&mut rng);
        assert_eq!(pk_encrypt(&kp.pk, b"", &mut rng), Err(CryptoError::EmptyPlaintext));
        assert_eq!(pk_encrypt(&GroupPoint::identity(), b"x", &mut rng), Err(CryptoError::InvalidPoint));
    }

    #[test]
    fn single_bit_flips_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let kp = KeyPair::generate(&mut rng);
        let c = pk_encrypt(&kp.pk, &[7u8; 52], &mut rng).unwrap();
        let wire = c.to_bytes();
        for _ in 0..1_000 {
            let mut w = wire.clone();
            let bit = rng.gen_range(0..w.len() * 8);
            w[bit / 8] ^= 1 << (bit % 8);
            // A flip in the ephemeral point may stop it decoding at all.
            if let Ok(t) = HybridCiphertext::from_bytes(&w) {
                assert_eq!(pk_decrypt(&kp.sk, &t), Err(CryptoError::DecryptionFailed));
            }
        }
    }

    #[test]
    fn wrong_keys_rejected() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let kp = KeyPair::generate(&mut rng);
        let c = pk_encrypt(&kp.pk, b"payload", &mut rng).unwrap();
        for _ in 0..1_000 {
            let wrong = Scalar::random_nonzero(&mut rng);
            assert_eq!(pk_decrypt(&wrong, &c), Err(CryptoError::DecryptionFailed));
        }
    }
}
