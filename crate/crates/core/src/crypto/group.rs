//! Prime-order elliptic-curve group.
//!
//! The concrete curve is secp256k1 (`y² = x³ + 7` over `F_p`, prime order `q`,
//! cofactor 1). Everything above this module goes through [`Scalar`] and
//! [`GroupPoint`], so the curve can be swapped by changing this file and the
//! width constants in [`curve`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use k256::elliptic_curve::group::Group;
use k256::elliptic_curve::ops::Reduce;
use k256::elliptic_curve::sec1::{FromEncodedPoint, ToEncodedPoint};
use k256::elliptic_curve::{Field as _, PrimeField};
use k256::{AffinePoint, EncodedPoint, FieldBytes, ProjectivePoint, U256};
use rand::{CryptoRng, RngCore};

use super::instrument::{self, Op};
use super::CryptoError;

/// Parameters of the curve backing [`GroupPoint`].
pub mod curve {
    pub const NAME: &str = "secp256k1";
    /// Field modulus `p`, big-endian hex.
    pub const FIELD_MODULUS_HEX: &str = "fffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2f";
    /// Group order `q`, big-endian hex.
    pub const ORDER_HEX: &str = "fffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141";
    /// Weierstrass coefficient `a`.
    pub const A: u64 = 0;
    /// Weierstrass coefficient `b`.
    pub const B: u64 = 7;
    /// Width of an encoded scalar (fixed, big-endian).
    pub const SCALAR_BYTES: usize = 32;
    /// Width of an encoded point (SEC1 compressed; identity is all zeros).
    pub const POINT_BYTES: usize = 33;
    /// Security level in bits.
    pub const SECURITY_BITS: u32 = 128;
}

/// Element of `Z_q`.
///
/// Arithmetic is closed over all of `Z_q`; constructors that model `Z_q*`
/// ([`Scalar::random_nonzero`], hash outputs) never yield zero.
#[derive(Clone, Copy, PartialEq, Eq, Default)]
pub struct Scalar(pub(crate) k256::Scalar);

impl Scalar {
    pub const ZERO: Scalar = Scalar(k256::Scalar::ZERO);
    pub const ONE: Scalar = Scalar(k256::Scalar::ONE);

    pub fn from_u64(v: u64) -> Self {
        Scalar(k256::Scalar::from(v))
    }

    /// Uniform over `[1, q-1]`.
    pub fn random_nonzero<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        loop {
            let s = k256::Scalar::random(&mut *rng);
            if !bool::from(s.is_zero()) {
                return Scalar(s);
            }
        }
    }

    /// Uniform over `Z_q`.
    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        Scalar(k256::Scalar::random(rng))
    }

    pub fn is_zero(&self) -> bool {
        bool::from(self.0.is_zero())
    }

    pub fn invert(&self) -> Option<Scalar> {
        instrument::record(Op::Inversion);
        Option::from(self.0.invert()).map(Scalar)
    }

    pub fn to_bytes(&self) -> [u8; curve::SCALAR_BYTES] {
        self.0.to_bytes().into()
    }

    /// Decodes a canonical big-endian encoding; values `>= q` are rejected.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.len() != curve::SCALAR_BYTES {
            return Err(CryptoError::Length { expected: curve::SCALAR_BYTES, got: bytes.len() });
        }
        let repr = FieldBytes::clone_from_slice(bytes);
        Option::from(k256::Scalar::from_repr(repr)).map(Scalar).ok_or(CryptoError::NonCanonicalScalar)
    }

    /// Reduces 32 big-endian bytes modulo `q`.
    pub fn from_bytes_reduced(bytes: &[u8; curve::SCALAR_BYTES]) -> Self {
        Scalar(<k256::Scalar as Reduce<U256>>::reduce_bytes(FieldBytes::from_slice(bytes)))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", hex::encode(self.to_bytes()))
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Self) -> Self {
        Scalar(self.0 + rhs.0)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Self) -> Self {
        Scalar(self.0 - rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Self) -> Self {
        instrument::record(Op::ModMul);
        Scalar(self.0 * rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Self {
        Scalar(-self.0)
    }
}

/// Point of the prime-order group, including the identity.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct GroupPoint(pub(crate) ProjectivePoint);

impl GroupPoint {
    pub fn generator() -> Self {
        GroupPoint(ProjectivePoint::GENERATOR)
    }

    pub fn identity() -> Self {
        GroupPoint(ProjectivePoint::IDENTITY)
    }

    pub fn is_identity(&self) -> bool {
        bool::from(self.0.is_identity())
    }

    /// `s·P` for the fixed generator `P`.
    pub fn mul_base(s: &Scalar) -> Self {
        instrument::record(Op::PointMul);
        GroupPoint(ProjectivePoint::GENERATOR * s.0)
    }

    pub fn mul(&self, s: &Scalar) -> Self {
        instrument::record(Op::PointMul);
        GroupPoint(self.0 * s.0)
    }

    pub fn add(&self, other: &GroupPoint) -> Self {
        instrument::record(Op::PointAdd);
        GroupPoint(self.0 + other.0)
    }

    pub fn negate(&self) -> Self {
        GroupPoint(-self.0)
    }

    /// Uniformly random non-identity point (discrete log discarded).
    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let s = Scalar::random_nonzero(rng);
        instrument::uncounted(|| GroupPoint::mul_base(&s))
    }

    pub fn to_bytes(&self) -> [u8; curve::POINT_BYTES] {
        let mut out = [0u8; curve::POINT_BYTES];
        if !self.is_identity() {
            out.copy_from_slice(self.0.to_affine().to_encoded_point(true).as_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.len() != curve::POINT_BYTES {
            return Err(CryptoError::Length { expected: curve::POINT_BYTES, got: bytes.len() });
        }
        if bytes.iter().all(|&b| b == 0) {
            return Ok(GroupPoint::identity());
        }
        if bytes[0] != 0x02 && bytes[0] != 0x03 {
            return Err(CryptoError::InvalidPoint);
        }
        let encoded = EncodedPoint::from_bytes(bytes).map_err(|_| CryptoError::InvalidPoint)?;
        let affine: Option<AffinePoint> = AffinePoint::from_encoded_point(&encoded).into();
        affine.map(|a| GroupPoint(a.into())).ok_or(CryptoError::InvalidPoint)
    }

    /// Affine `(x, y)` as big-endian field elements; `None` for the identity.
    pub fn coordinates(&self) -> Option<([u8; 32], [u8; 32])> {
        if self.is_identity() {
            return None;
        }
        let enc = self.0.to_affine().to_encoded_point(false);
        let mut x = [0u8; 32];
        let mut y = [0u8; 32];
        x.copy_from_slice(enc.x()?);
        y.copy_from_slice(enc.y()?);
        Some((x, y))
    }
}

impl fmt::Debug for GroupPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupPoint({})", hex::encode(self.to_bytes()))
    }
}

impl Add for GroupPoint {
    type Output = GroupPoint;
    fn add(self, rhs: Self) -> Self {
        GroupPoint::add(&self, &rhs)
    }
}

impl Mul<Scalar> for GroupPoint {
    type Output = GroupPoint;
    fn mul(self, rhs: Scalar) -> Self {
        GroupPoint::mul(&self, &rhs)
    }
}

/// Long-term key pair with `pk = sk·P`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyPair {
    pub sk: Scalar,
    pub pk: GroupPoint,
}

impl KeyPair {
    pub fn generate<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let sk = Scalar::random_nonzero(rng);
        KeyPair::from_secret(sk)
    }

    pub fn from_secret(sk: Scalar) -> Self {
        KeyPair { sk, pk: GroupPoint::mul_base(&sk) }
    }
}

pub fn keygen<R: RngCore + CryptoRng>(rng: &mut R) -> KeyPair {
    KeyPair::generate(rng)
}
