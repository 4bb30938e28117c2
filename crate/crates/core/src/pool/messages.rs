//! Wire messages for initial authentication and re-authentication.
//!
//! | message                | fields                                   | bytes |
//! |------------------------|------------------------------------------|-------|
//! | `InitialAuthRequest`   | tag, c1, c2 (1 scalar), PID_k            | 86    |
//! | `ReauthRequest`        | tag, c1, c2 (2 scalars), PID_k, PID_k+1  | 138   |
//! | `AuthReport`           | tag, Enc_PK_pub(a ‖ PID)                 | 102   |
//! | `AuthConfirm`          | tag, A                                   | 34    |

use crate::codec::{CodecError, MessageKind, Reader, WireMessage};
use crate::crypto::{curve, pke, GroupPoint, HybridCiphertext, Pseudonym, PSEUDONYM_BYTES};

/// Plaintext carried inside an [`AuthReport`]: `a ‖ PID`.
pub const REPORT_PLAINTEXT_BYTES: usize = curve::SCALAR_BYTES + PSEUDONYM_BYTES;

/// RN → RPM, first step of initial authentication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InitialAuthRequest {
    pub c1: GroupPoint,
    pub c2: [u8; curve::SCALAR_BYTES],
    pub pid: Pseudonym,
}

/// RN → RPM of another pool, first step of re-authentication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReauthRequest {
    pub c1: GroupPoint,
    pub c2: [u8; 2 * curve::SCALAR_BYTES],
    pub pid: Pseudonym,
    pub next_pid: Pseudonym,
}

/// RPM → MSRP: the recovered credential, encrypted under `PK_pub`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthReport {
    pub ciphertext: HybridCiphertext,
}

/// RPM → RN: `A = a·P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthConfirm {
    pub a_point: GroupPoint,
}

impl WireMessage for InitialAuthRequest {
    const KIND: MessageKind = MessageKind::InitialAuthRequest;

    fn encode_body(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.c1.to_bytes());
        out.extend_from_slice(&self.c2);
        out.extend_from_slice(self.pid.as_bytes());
    }

    fn decode_body(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        Ok(InitialAuthRequest {
            c1: r.point()?,
            c2: r.take(curve::SCALAR_BYTES)?.try_into().expect("scalar width"),
            pid: r.pseudonym()?,
        })
    }
}

impl WireMessage for ReauthRequest {
    const KIND: MessageKind = MessageKind::ReauthRequest;

    fn encode_body(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.c1.to_bytes());
        out.extend_from_slice(&self.c2);
        out.extend_from_slice(self.pid.as_bytes());
        out.extend_from_slice(self.next_pid.as_bytes());
    }

    fn decode_body(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        Ok(ReauthRequest {
            c1: r.point()?,
            c2: r.take(2 * curve::SCALAR_BYTES)?.try_into().expect("two scalar widths"),
            pid: r.pseudonym()?,
            next_pid: r.pseudonym()?,
        })
    }
}

impl WireMessage for AuthReport {
    const KIND: MessageKind = MessageKind::AuthReport;

    fn encode_body(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.ciphertext.to_bytes());
    }

    fn decode_body(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        Ok(AuthReport { ciphertext: r.ciphertext(REPORT_PLAINTEXT_BYTES)? })
    }
}

impl WireMessage for AuthConfirm {
    const KIND: MessageKind = MessageKind::AuthConfirm;

    fn encode_body(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.a_point.to_bytes());
    }

    fn decode_body(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        Ok(AuthConfirm { a_point: r.point()? })
    }
}

pub const INITIAL_AUTH_REQUEST_BYTES: usize = 1 + curve::POINT_BYTES + curve::SCALAR_BYTES + PSEUDONYM_BYTES;
pub const REAUTH_REQUEST_BYTES: usize = 1 + curve::POINT_BYTES + 2 * curve::SCALAR_BYTES + 2 * PSEUDONYM_BYTES;
pub const AUTH_REPORT_BYTES: usize = 1 + pke::OVERHEAD_BYTES + REPORT_PLAINTEXT_BYTES;
pub const AUTH_CONFIRM_BYTES: usize = 1 + curve::POINT_BYTES;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::{KeyPair, Scalar};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn point(seed: u64) -> GroupPoint {
        GroupPoint::mul_base(&Scalar::from_u64(seed + 1))
    }

    #[test]
    fn documented_widths() {
        assert_eq!(INITIAL_AUTH_REQUEST_BYTES, 86);
        assert_eq!(REAUTH_REQUEST_BYTES, 138);
        assert_eq!(AUTH_REPORT_BYTES, 102);
        assert_eq!(AUTH_CONFIRM_BYTES, 34);

        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let kp = KeyPair::generate(&mut rng);
        let ct = pke::pk_encrypt(&kp.pk, &[1u8; REPORT_PLAINTEXT_BYTES], &mut rng).unwrap();
        assert_eq!(AuthReport { ciphertext: ct }.to_bytes().len(), AUTH_REPORT_BYTES);
        assert_eq!(AuthConfirm { a_point: kp.pk }.to_bytes().len(), AUTH_CONFIRM_BYTES);
    }

    #[test]
    fn rejects_wrong_tag_and_trailing() {
        let m = AuthConfirm { a_point: point(3) };
        let mut b = m.to_bytes();
        assert_eq!(InitialAuthRequest::from_bytes(&b), Err(CodecError::Tag(0x14)));
        b.push(0);
        assert_eq!(AuthConfirm::from_bytes(&b), Err(CodecError::Trailing(1)));
        assert_eq!(AuthConfirm::from_bytes(&b[..10]), Err(CodecError::Truncated));
    }

    proptest! {
        #[test]
        fn request_codecs_roundtrip(s in 0u64..1_000_000, c2 in any::<[u8; 32]>(), c2b in any::<[u8; 32]>(),
                                    p1 in any::<[u8; 20]>(), p2 in any::<[u8; 20]>()) {
            let init = InitialAuthRequest { c1: point(s), c2, pid: Pseudonym::new(p1) };
            let bytes = init.to_bytes();
            prop_assert_eq!(bytes.len(), INITIAL_AUTH_REQUEST_BYTES);
            prop_assert_eq!(InitialAuthRequest::from_bytes(&bytes).unwrap(), init);

            let mut wide = [0u8; 64];
            wide[..32].copy_from_slice(&c2);
            wide[32..].copy_from_slice(&c2b);
            let re = ReauthRequest { c1: point(s), c2: wide, pid: Pseudonym::new(p1), next_pid: Pseudonym::new(p2) };
            let bytes = re.to_bytes();
            prop_assert_eq!(bytes.len(), REAUTH_REQUEST_BYTES);
            prop_assert_eq!(ReauthRequest::from_bytes(&bytes).unwrap(), re);
        }
    }
}
