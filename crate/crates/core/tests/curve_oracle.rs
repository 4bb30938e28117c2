//! Group arithmetic checked against a textbook affine implementation over
//! big integers.

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rsms_core::crypto::curve;
use rsms_core::{GroupPoint, KeyPair, Scalar};

fn big(hex: &str) -> BigUint {
    BigUint::parse_bytes(hex.as_bytes(), 16).unwrap()
}

#[derive(Clone, Debug, PartialEq)]
enum Affine {
    Infinity,
    At(BigUint, BigUint),
}

struct Oracle {
    p: BigUint,
}

impl Oracle {
    fn new() -> Self {
        Oracle { p: big(curve::FIELD_MODULUS_HEX) }
    }

    fn inv(&self, v: &BigUint) -> BigUint {
        v.modpow(&(&self.p - 2u32), &self.p)
    }

    fn sub(&self, a: &BigUint, b: &BigUint) -> BigUint {
        ((a + &self.p) - (b % &self.p)) % &self.p
    }

    fn on_curve(&self, x: &BigUint, y: &BigUint) -> bool {
        let lhs = y * y % &self.p;
        let rhs = (x * x * x + BigUint::from(curve::A) * x + BigUint::from(curve::B)) % &self.p;
        lhs == rhs
    }

    fn add(&self, a: &Affine, b: &Affine) -> Affine {
        let (Affine::At(x1, y1), Affine::At(x2, y2)) = (a, b) else {
            return if *a == Affine::Infinity { b.clone() } else { a.clone() };
        };
        let lambda = if x1 == x2 {
            if (y1 + y2) % &self.p == BigUint::ZERO {
                return Affine::Infinity;
            }
            (BigUint::from(3u32) * x1 * x1 + BigUint::from(curve::A)) * self.inv(&(BigUint::from(2u32) * y1)) % &self.p
        } else {
            self.sub(y2, y1) * self.inv(&self.sub(x2, x1)) % &self.p
        };
        let x3 = self.sub(&self.sub(&(&lambda * &lambda), x1), x2);
        let y3 = self.sub(&(&lambda * self.sub(x1, &x3)), y1);
        Affine::At(x3, y3)
    }

    fn mul(&self, pt: &Affine, k: &BigUint) -> Affine {
        let mut acc = Affine::Infinity;
        for i in (0..k.bits()).rev() {
            acc = self.add(&acc, &acc);
            if k.bit(i) {
                acc = self.add(&acc, pt);
            }
        }
        acc
    }
}

fn affine(p: &GroupPoint) -> Affine {
    match p.coordinates() {
        None => Affine::Infinity,
        Some((x, y)) => Affine::At(BigUint::from_bytes_be(&x), BigUint::from_bytes_be(&y)),
    }
}

#[test]
fn random_points_satisfy_the_curve_equation() {
    let o = Oracle::new();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    for _ in 0..500 {
        let Affine::At(x, y) = affine(&GroupPoint::random(&mut rng)) else { panic!("identity") };
        assert!(o.on_curve(&x, &y));
    }
}

#[test]
fn addition_and_doubling_match_affine_formulas() {
    let o = Oracle::new();
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    for _ in 0..200 {
        let (a, b) = (GroupPoint::random(&mut rng), GroupPoint::random(&mut rng));
        assert_eq!(affine(&(a + b)), o.add(&affine(&a), &affine(&b)));
        assert_eq!(affine(&(a + a)), o.add(&affine(&a), &affine(&a)));
        assert_eq!(affine(&(a + a.negate())), Affine::Infinity);
    }
}

#[test]
fn scalar_multiplication_matches_double_and_add() {
    let o = Oracle::new();
    let g = affine(&GroupPoint::generator());
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    for _ in 0..40 {
        let s = Scalar::random_nonzero(&mut rng);
        let k = BigUint::from_bytes_be(&s.to_bytes());
        assert_eq!(affine(&GroupPoint::mul_base(&s)), o.mul(&g, &k));
    }
    // q·G is the identity and (q-1)·G = -G.
    let q = big(curve::ORDER_HEX);
    assert_eq!(o.mul(&g, &q), Affine::Infinity);
    let minus_one = Scalar::from_bytes(&(&q - 1u32).to_bytes_be()).unwrap();
    assert_eq!(GroupPoint::mul_base(&minus_one), GroupPoint::generator().negate());
}

#[test]
fn encodings_have_recorded_widths() {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let p = GroupPoint::random(&mut rng);
    assert_eq!(p.to_bytes().len(), curve::POINT_BYTES);
    assert_eq!(Scalar::random(&mut rng).to_bytes().len(), curve::SCALAR_BYTES);
    assert_eq!(GroupPoint::from_bytes(&p.to_bytes()).unwrap(), p);
    assert_eq!((curve::POINT_BYTES, curve::SCALAR_BYTES, curve::SECURITY_BITS), (33, 32, 128));
}

#[test]
fn keygen_is_consistent_and_distinct() {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let mut seen = std::collections::HashSet::new();
    for _ in 0..10_000 {
        let kp = KeyPair::generate(&mut rng);
        assert_eq!(kp.pk, GroupPoint::mul_base(&kp.sk));
        assert!(seen.insert(kp.pk.to_bytes()));
    }
}
