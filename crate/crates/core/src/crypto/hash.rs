//! The H1–H6 hash family.
//!
//! All six functions share SHA-256 (SHAKE256 for the extendable `H3`) and are
//! separated by a domain prefix plus a one-byte tag. Every input is framed as
//! `len:u32be || bytes`, so distinct input lists never collide by
//! concatenation. Scalar-valued tags use rejection sampling with a counter
//! until the digest lands in `[1, q-1]`.

use sha2::{Digest, Sha256};
use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use super::group::{curve, GroupPoint, Scalar};
use super::ident::{Pseudonym, PSEUDONYM_BYTES};
use super::instrument::{self, Op};
use super::CryptoError;

const DOMAIN: &[u8] = b"rsms/hash/v1";
const MASK_DOMAIN: &[u8] = b"rsms/pair-mask/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HashTag {
    H1 = 1,
    H2 = 2,
    H3 = 3,
    H4 = 4,
    H5 = 5,
    H6 = 6,
}

impl HashTag {
    pub const ALL: [HashTag; 6] = [HashTag::H1, HashTag::H2, HashTag::H3, HashTag::H4, HashTag::H5, HashTag::H6];

    fn yields_scalar(self) -> bool {
        matches!(self, HashTag::H2 | HashTag::H4 | HashTag::H5)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HashOutput {
    Scalar(Scalar),
    Bytes(Vec<u8>),
}

impl HashOutput {
    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            HashOutput::Scalar(s) => s.to_bytes().to_vec(),
            HashOutput::Bytes(b) => b.clone(),
        }
    }
}

fn framed_sha256(tag: HashTag, counter: Option<u32>, inputs: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    Digest::update(&mut h, DOMAIN);
    Digest::update(&mut h, [tag as u8]);
    if let Some(c) = counter {
        Digest::update(&mut h, c.to_be_bytes());
    }
    for input in inputs {
        Digest::update(&mut h, (input.len() as u32).to_be_bytes());
        Digest::update(&mut h, input);
    }
    h.finalize().into()
}

fn xof(domain: &[u8], tag: u8, inputs: &[&[u8]], out_len: usize) -> Vec<u8> {
    let mut x = Shake256::default();
    x.update(domain);
    x.update(&[tag]);
    for input in inputs {
        x.update(&(input.len() as u32).to_be_bytes());
        x.update(input);
    }
    let mut out = vec![0u8; out_len];
    x.finalize_xof().read(&mut out);
    out
}

/// Evaluates hash `tag` over `inputs`.
///
/// `out_len` is only meaningful for `H3`, which defaults to one scalar width.
pub fn hash(tag: HashTag, inputs: &[&[u8]], out_len: Option<usize>) -> Result<HashOutput, CryptoError> {
    if inputs.is_empty() {
        return Err(CryptoError::EmptyHashInput);
    }
    if out_len.is_some() && tag != HashTag::H3 {
        return Err(CryptoError::OutputLengthNotSupported(tag));
    }
    instrument::record(Op::Hash);
    let out = match tag {
        HashTag::H3 => {
            let len = out_len.unwrap_or(curve::SCALAR_BYTES);
            if len == 0 {
                return Err(CryptoError::ZeroOutputLength);
            }
            HashOutput::Bytes(xof(DOMAIN, tag as u8, inputs, len))
        }
        t if t.yields_scalar() => {
            let mut counter = 0u32;
            loop {
                let digest = framed_sha256(tag, Some(counter), inputs);
                match Scalar::from_bytes(&digest) {
                    Ok(s) if !s.is_zero() => break HashOutput::Scalar(s),
                    _ => counter += 1,
                }
            }
        }
        _ => HashOutput::Bytes(framed_sha256(tag, None, inputs)[..PSEUDONYM_BYTES].to_vec()),
    };
    Ok(out)
}

fn expect_scalar(out: HashOutput) -> Scalar {
    match out {
        HashOutput::Scalar(s) => s,
        HashOutput::Bytes(_) => unreachable!("scalar tag produced bytes"),
    }
}

fn expect_pseudonym(out: HashOutput) -> Pseudonym {
    match out {
        HashOutput::Bytes(b) => Pseudonym::from_slice(&b).expect("pseudonym width"),
        HashOutput::Scalar(_) => unreachable!("byte tag produced a scalar"),
    }
}

/// `H1: G -> {0,1}^160`.
pub fn h1(point: &GroupPoint) -> Pseudonym {
    expect_pseudonym(hash(HashTag::H1, &[&point.to_bytes()], None).expect("non-empty input"))
}

/// `H2: {0,1}* -> Z_q*`.
pub fn h2(data: &[u8]) -> Scalar {
    expect_scalar(hash(HashTag::H2, &[data], None).expect("non-empty input"))
}

/// `H3: G × {0,1}* -> {0,1}^(8·out_len)`.
pub fn h3(point: &GroupPoint, data: &[u8], out_len: usize) -> Vec<u8> {
    match hash(HashTag::H3, &[&point.to_bytes(), data], Some(out_len)) {
        Ok(HashOutput::Bytes(b)) => b,
        other => panic!("H3 evaluation failed: {other:?}"),
    }
}

/// `H4: (Z_q*)^n -> Z_q*`, over the fixed-width encodings of its arguments.
pub fn h4(args: &[&Scalar]) -> Scalar {
    let encoded: Vec<[u8; curve::SCALAR_BYTES]> = args.iter().map(|s| s.to_bytes()).collect();
    let inputs: Vec<&[u8]> = encoded.iter().map(|b| b.as_slice()).collect();
    expect_scalar(hash(HashTag::H4, &inputs, None).expect("H4 needs at least one argument"))
}

/// `H5: G × G -> Z_q*`.
pub fn h5(a: &GroupPoint, b: &GroupPoint) -> Scalar {
    expect_scalar(hash(HashTag::H5, &[&a.to_bytes(), &b.to_bytes()], None).expect("non-empty input"))
}

/// `H6: {0,1}^160 × Z_q* -> {0,1}^160`.
pub fn h6(pid: &Pseudonym, a: &Scalar) -> Pseudonym {
    expect_pseudonym(hash(HashTag::H6, &[pid.as_bytes(), &a.to_bytes()], None).expect("non-empty input"))
}

/// Mask derived from a pairwise Diffie–Hellman point, `out_len` bytes wide.
pub fn point_mask(dh: &GroupPoint, out_len: usize) -> Vec<u8> {
    instrument::record(Op::PointMask);
    xof(MASK_DOMAIN, 0, &[&dh.to_bytes()], out_len)
}

pub fn xor_into(dst: &mut [u8], mask: &[u8]) {
    assert_eq!(dst.len(), mask.len(), "mask width mismatch");
    dst.iter_mut().zip(mask).for_each(|(d, m)| *d ^= m);
}
