//! Curve arithmetic, the hash family, hybrid encryption and secret sharing.

pub mod group;
pub mod hash;
pub mod ident;
pub mod instrument;
pub mod pke;
pub mod shamir;

use thiserror::Error;

pub use group::{curve, keygen, GroupPoint, KeyPair, Scalar};
pub use hash::{h1, h2, h3, h4, h5, h6, hash, point_mask, HashOutput, HashTag};
pub use ident::{Pseudonym, RealId, PSEUDONYM_BYTES};
pub use pke::{pk_decrypt, pk_encrypt, HybridCiphertext};
pub use shamir::{
    lagrange_coeff_at_zero, lagrange_coeffs_at_zero, share_generate, share_reconstruct, Field, Polynomial, Share,
    SmallField,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CryptoError {
    #[error("expected {expected} bytes, got {got}")]
    Length { expected: usize, got: usize },
    #[error("scalar encoding is not reduced modulo the group order")]
    NonCanonicalScalar,
    #[error("bytes do not encode a point on the curve")]
    InvalidPoint,
    #[error("hash called with no inputs")]
    EmptyHashInput,
    #[error("{0:?} has a fixed output width")]
    OutputLengthNotSupported(HashTag),
    #[error("extendable output of zero bytes requested")]
    ZeroOutputLength,
    #[error("cannot encrypt an empty message")]
    EmptyPlaintext,
    #[error("authenticated encryption failed")]
    Aead,
    #[error("authenticated decryption failed")]
    DecryptionFailed,
    #[error("evaluation points must be nonzero")]
    ZeroEvaluationPoint,
    #[error("evaluation points must be pairwise distinct")]
    DuplicateEvaluationPoint,
    #[error("expected {expected} shares, got {got}")]
    ShareCount { expected: usize, got: usize },
}
