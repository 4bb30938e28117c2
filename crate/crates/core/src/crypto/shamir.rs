//! Shamir secret sharing and Lagrange interpolation at zero.
//!
//! Generic over [`Field`], implemented for the curve scalar field and for
//! small prime fields ([`SmallField`]) that can be checked by hand.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use rand::{CryptoRng, Rng, RngCore};

use super::group::Scalar;
use super::CryptoError;

pub trait Field:
    Copy + Eq + Debug + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn invert(&self) -> Option<Self>;
    /// Uniform over the whole field.
    fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self;
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::ZERO
    }
    fn one() -> Self {
        Scalar::ONE
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn invert(&self) -> Option<Self> {
        Scalar::invert(self)
    }
    fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        Scalar::random(rng)
    }
}

/// `Z_P` for a small prime `P` (`P < 2^32`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SmallField<const P: u64>(u64);

impl<const P: u64> SmallField<P> {
    pub fn new(v: u64) -> Self {
        SmallField(v % P)
    }

    pub fn value(&self) -> u64 {
        self.0
    }

    fn pow(self, mut e: u64) -> Self {
        let mut base = self;
        let mut acc = SmallField(1 % P);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }
}

impl<const P: u64> Add for SmallField<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        SmallField((self.0 + rhs.0) % P)
    }
}

impl<const P: u64> Sub for SmallField<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        SmallField((self.0 + P - rhs.0) % P)
    }
}

impl<const P: u64> Mul for SmallField<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        SmallField(self.0 * rhs.0 % P)
    }
}

impl<const P: u64> Neg for SmallField<P> {
    type Output = Self;
    fn neg(self) -> Self {
        SmallField((P - self.0) % P)
    }
}

impl<const P: u64> Field for SmallField<P> {
    fn zero() -> Self {
        SmallField(0)
    }
    fn one() -> Self {
        SmallField(1 % P)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn invert(&self) -> Option<Self> {
        // Fermat; P is prime.
        (self.0 != 0).then(|| self.pow(P - 2))
    }
    fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        SmallField(rng.gen_range(0..P))
    }
}

/// `f(x) = c_0 + c_1 x + … + c_d x^d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Polynomial<F> {
    /// `coeffs[0]` is the constant term. An empty list is the zero polynomial.
    pub fn from_coefficients(coeffs: Vec<F>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![F::zero()] } else { coeffs };
        Polynomial { coeffs }
    }

    /// Degree-`degree` polynomial with `f(0) = constant` and uniform higher coefficients.
    pub fn random_with_constant<R: RngCore + CryptoRng>(constant: F, degree: usize, rng: &mut R) -> Self {
        let mut coeffs = Vec::with_capacity(degree + 1);
        coeffs.push(constant);
        coeffs.extend((0..degree).map(|_| F::random(rng)));
        Polynomial { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn constant(&self) -> F {
        self.coeffs[0]
    }

    pub fn evaluate(&self, x: F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, &c| acc * x + c)
    }

    pub fn shares(&self, eval_points: &[F]) -> Result<Vec<Share<F>>, CryptoError> {
        check_nodes(eval_points)?;
        Ok(eval_points.iter().map(|&x| Share { x, y: self.evaluate(x) }).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Share<F> {
    pub x: F,
    pub y: F,
}

fn check_nodes<F: Field>(xs: &[F]) -> Result<(), CryptoError> {
    for (i, x) in xs.iter().enumerate() {
        if x.is_zero() {
            return Err(CryptoError::ZeroEvaluationPoint);
        }
        if xs[..i].contains(x) {
            return Err(CryptoError::DuplicateEvaluationPoint);
        }
    }
    Ok(())
}

/// Splits `secret` with a fresh degree-`degree` polynomial, one share per point.
pub fn share_generate<F: Field, R: RngCore + CryptoRng>(
    secret: F,
    eval_points: &[F],
    degree: usize,
    rng: &mut R,
) -> Result<Vec<Share<F>>, CryptoError> {
    if eval_points.len() != degree + 1 {
        return Err(CryptoError::ShareCount { expected: degree + 1, got: eval_points.len() });
    }
    check_nodes(eval_points)?;
    Polynomial::random_with_constant(secret, degree, rng).shares(eval_points)
}

/// `λ_i = ∏_{r≠i} (−x_r)/(x_i − x_r)`.
pub fn lagrange_coeff_at_zero<F: Field>(xs: &[F], i: usize) -> Result<F, CryptoError> {
    check_nodes(xs)?;
    if i >= xs.len() {
        return Err(CryptoError::ShareCount { expected: i + 1, got: xs.len() });
    }
    Ok(coeff_unchecked(xs, i))
}

fn coeff_unchecked<F: Field>(xs: &[F], i: usize) -> F {
    let mut num = F::one();
    let mut den = F::one();
    for (r, &xr) in xs.iter().enumerate() {
        if r != i {
            num = num * -xr;
            den = den * (xs[i] - xr);
        }
    }
    num * den.invert().expect("distinct nodes give a nonzero denominator")
}

/// All coefficients for `xs`, in order.
pub fn lagrange_coeffs_at_zero<F: Field>(xs: &[F]) -> Result<Vec<F>, CryptoError> {
    check_nodes(xs)?;
    Ok((0..xs.len()).map(|i| coeff_unchecked(xs, i)).collect())
}

/// Interpolates `f(0)` from exactly `degree + 1` shares.
pub fn share_reconstruct<F: Field>(shares: &[Share<F>]) -> Result<F, CryptoError> {
    if shares.is_empty() {
        return Err(CryptoError::ShareCount { expected: 1, got: 0 });
    }
    let xs: Vec<F> = shares.iter().map(|s| s.x).collect();
    let lambdas = lagrange_coeffs_at_zero(&xs)?;
    Ok(shares.iter().zip(lambdas).fold(F::zero(), |acc, (s, l)| acc + l * s.y))
}
