//! Exact field arithmetic over Q and F_p (p prime, p < 2^31).
//!
//! Every scalar carries its field tag, so mixing elements of different
//! fields is caught at runtime. Rationals are arbitrary-precision and kept
//! in lowest terms with positive denominator; prime-field elements are
//! canonical residues in `[0, p)`. With `p < 2^31`, products of residues
//! fit in a `u64` without overflow.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// Largest permitted modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 31;

/// Which field scalars live in: the rationals, or a prime field F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldSpec {
    Rationals,
    Prime(u64),
}

impl FieldSpec {
    /// Construct a prime-field spec, checking primality by trial division
    /// (adequate for p < 2^31).
    pub fn prime(p: u64) -> Result<FieldSpec> {
        if p < 2 || p >= MAX_MODULUS {
            return Err(Error::ModulusOutOfRange(p));
        }
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldSpec::Prime(p))
    }

    pub fn rationals() -> FieldSpec {
        FieldSpec::Rationals
    }

    /// 0 for the rationals, p for F_p.
    pub fn characteristic(&self) -> u64 {
        match self {
            FieldSpec::Rationals => 0,
            FieldSpec::Prime(p) => *p,
        }
    }

    /// Parse the CLI/file token: `Q` or `Fp:<prime>`.
    pub fn parse_token(s: &str) -> Result<FieldSpec> {
        let s = s.trim();
        if s == "Q" {
            return Ok(FieldSpec::Rationals);
        }
        if let Some(rest) = s.strip_prefix("Fp:") {
            let p: u64 = rest
                .parse()
                .map_err(|_| Error::Unsupported(format!("bad field token `{s}`")))?;
            return FieldSpec::prime(p);
        }
        Err(Error::Unsupported(format!("bad field token `{s}`")))
    }

    pub fn zero(&self) -> FieldScalar {
        FieldScalar::zero(*self)
    }

    pub fn one(&self) -> FieldScalar {
        FieldScalar::one(*self)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "Q"),
            FieldSpec::Prime(p) => write!(f, "Fp:{p}"),
        }
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// An exact element of Q or of F_p, tagged with its field.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FieldScalar {
    Rat(BigRational),
    Mod { p: u64, v: u64 },
}

impl FieldScalar {
    pub fn spec(&self) -> FieldSpec {
        match self {
            FieldScalar::Rat(_) => FieldSpec::Rationals,
            FieldScalar::Mod { p, .. } => FieldSpec::Prime(*p),
        }
    }

    pub fn zero(spec: FieldSpec) -> FieldScalar {
        FieldScalar::from_i64(spec, 0)
    }

    pub fn one(spec: FieldSpec) -> FieldScalar {
        FieldScalar::from_i64(spec, 1)
    }

    pub fn from_i64(spec: FieldSpec, n: i64) -> FieldScalar {
        match spec {
            FieldSpec::Rationals => FieldScalar::Rat(BigRational::from(BigInt::from(n))),
            FieldSpec::Prime(p) => {
                let v = n.rem_euclid(p as i64) as u64;
                FieldScalar::Mod { p, v }
            }
        }
    }

    pub fn from_bigint(spec: FieldSpec, n: &BigInt) -> FieldScalar {
        match spec {
            FieldSpec::Rationals => FieldScalar::Rat(BigRational::from(n.clone())),
            FieldSpec::Prime(p) => {
                let v = n.mod_floor_u64(p);
                FieldScalar::Mod { p, v }
            }
        }
    }

    pub fn from_rational(r: BigRational) -> FieldScalar {
        FieldScalar::Rat(r)
    }

    /// Residue numerator/denominator pair mapped into `spec`.
    pub fn from_ratio(spec: FieldSpec, num: &BigInt, den: &BigInt) -> Result<FieldScalar> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match spec {
            FieldSpec::Rationals => Ok(FieldScalar::Rat(BigRational::new(num.clone(), den.clone()))),
            FieldSpec::Prime(_) => {
                let n = FieldScalar::from_bigint(spec, num);
                let d = FieldScalar::from_bigint(spec, den);
                n.checked_mul(&d.inv()?)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldScalar::Rat(r) => r.is_zero(),
            FieldScalar::Mod { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldScalar::Rat(r) => r.is_one(),
            FieldScalar::Mod { v, .. } => *v == 1,
        }
    }

    fn check_same(&self, other: &FieldScalar) -> Result<()> {
        if self.spec() == other.spec() {
            Ok(())
        } else {
            Err(Error::SpecMismatch {
                left: self.spec().to_string(),
                right: other.spec().to_string(),
            })
        }
    }

    pub fn checked_add(&self, other: &FieldScalar) -> Result<FieldScalar> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (FieldScalar::Rat(a), FieldScalar::Rat(b)) => FieldScalar::Rat(a + b),
            (FieldScalar::Mod { p, v: a }, FieldScalar::Mod { v: b, .. }) => FieldScalar::Mod {
                p: *p,
                v: (a + b) % p,
            },
            _ => unreachable!(),
        })
    }

    pub fn checked_sub(&self, other: &FieldScalar) -> Result<FieldScalar> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (FieldScalar::Rat(a), FieldScalar::Rat(b)) => FieldScalar::Rat(a - b),
            (FieldScalar::Mod { p, v: a }, FieldScalar::Mod { v: b, .. }) => FieldScalar::Mod {
                p: *p,
                v: (a + p - b) % p,
            },
            _ => unreachable!(),
        })
    }

    pub fn checked_mul(&self, other: &FieldScalar) -> Result<FieldScalar> {
        self.check_same(other)?;
        Ok(match (self, other) {
            (FieldScalar::Rat(a), FieldScalar::Rat(b)) => FieldScalar::Rat(a * b),
            (FieldScalar::Mod { p, v: a }, FieldScalar::Mod { v: b, .. }) => FieldScalar::Mod {
                p: *p,
                v: (a * b) % p,
            },
            _ => unreachable!(),
        })
    }

    pub fn negate(&self) -> FieldScalar {
        match self {
            FieldScalar::Rat(a) => FieldScalar::Rat(-a),
            FieldScalar::Mod { p, v } => FieldScalar::Mod {
                p: *p,
                v: if *v == 0 { 0 } else { p - v },
            },
        }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<FieldScalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match self {
            FieldScalar::Rat(a) => FieldScalar::Rat(a.recip()),
            FieldScalar::Mod { p, v } => FieldScalar::Mod {
                p: *p,
                v: mod_pow(*v, p - 2, *p),
            },
        })
    }

    pub fn checked_div(&self, other: &FieldScalar) -> Result<FieldScalar> {
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, e: u64) -> FieldScalar {
        match self {
            FieldScalar::Rat(a) => {
                let mut acc = BigRational::one();
                let mut base = a.clone();
                let mut e = e;
                while e > 0 {
                    if e & 1 == 1 {
                        acc *= &base;
                    }
                    base = &base * &base;
                    e >>= 1;
                }
                FieldScalar::Rat(acc)
            }
            FieldScalar::Mod { p, v } => FieldScalar::Mod {
                p: *p,
                v: mod_pow(*v, e, *p),
            },
        }
    }

    /// Canonical residue in `[0, p)` for prime fields.
    pub fn residue(&self) -> Option<u64> {
        match self {
            FieldScalar::Mod { v, .. } => Some(*v),
            FieldScalar::Rat(_) => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            FieldScalar::Rat(r) => Some(r),
            FieldScalar::Mod { .. } => None,
        }
    }

    /// Re-interpret this scalar in `to`. Rationals map into F_p by reducing
    /// numerator and denominator (error when p divides the denominator);
    /// residues lift to Q (or move to another prime field) via the canonical
    /// representative in `[0, p)`.
    pub fn map_spec(&self, to: FieldSpec) -> Result<FieldScalar> {
        if self.spec() == to {
            return Ok(self.clone());
        }
        match self {
            FieldScalar::Rat(r) => {
                let num = FieldScalar::from_bigint(to, r.numer());
                let den = FieldScalar::from_bigint(to, r.denom());
                if den.is_zero() {
                    return Err(Error::Unsupported(format!(
                        "denominator {} is not a unit in {}",
                        r.denom(),
                        to
                    )));
                }
                num.checked_mul(&den.inv()?)
            }
            FieldScalar::Mod { v, .. } => Ok(FieldScalar::from_i64(to, *v as i64)),
        }
    }

    /// Parse a coefficient token: an integer or `a/b`.
    pub fn parse(spec: FieldSpec, token: &str) -> Result<FieldScalar> {
        let bad = || Error::Unsupported(format!("bad coefficient `{token}`"));
        if let Some((a, b)) = token.split_once('/') {
            let num: BigInt = a.trim().parse().map_err(|_| bad())?;
            let den: BigInt = b.trim().parse().map_err(|_| bad())?;
            FieldScalar::from_ratio(spec, &num, &den)
        } else {
            let n: BigInt = token.trim().parse().map_err(|_| bad())?;
            Ok(FieldScalar::from_bigint(spec, &n))
        }
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldScalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            FieldScalar::Mod { v, .. } => write!(f, "{v}"),
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl $trait for &FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: &FieldScalar) -> FieldScalar {
                self.$checked(rhs).expect("field mismatch")
            }
        }
        impl $trait for FieldScalar {
            type Output = FieldScalar;
            fn $method(self, rhs: FieldScalar) -> FieldScalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, checked_add);
scalar_binop!(Sub, sub, checked_sub);
scalar_binop!(Mul, mul, checked_mul);

impl Neg for &FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        self.negate()
    }
}

impl Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        self.negate()
    }
}

fn mod_pow(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64 % p;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    acc
}

trait ModFloor {
    fn mod_floor_u64(&self, p: u64) -> u64;
}

impl ModFloor for BigInt {
    fn mod_floor_u64(&self, p: u64) -> u64 {
        let m = self % BigInt::from(p);
        let m = if m.is_negative() { m + BigInt::from(p) } else { m };
        m.to_u64().expect("residue fits u64")
    }
}

/// The seeded stream used everywhere randomness is called for. All sampling
/// is driven by explicit streams of this kind; there is no ambient RNG.
pub type Stream = ChaCha12Rng;

pub fn seeded_stream(seed: u64) -> Stream {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Uniform draw from F_p. The rationals have no uniform distribution, so a
/// rationals spec is rejected; use [`sample_int_scalar`] to draw bounded
/// integer-valued rationals instead.
pub fn sample_uniform(spec: FieldSpec, rng: &mut impl Rng) -> Result<FieldScalar> {
    match spec {
        FieldSpec::Prime(p) => Ok(FieldScalar::Mod {
            p,
            v: rng.gen_range(0..p),
        }),
        FieldSpec::Rationals => Err(Error::Unsupported(
            "uniform sampling needs a prime field".into(),
        )),
    }
}

/// Integer-valued scalar drawn uniformly from `[-bound, bound]`, usable over
/// any field; this is the documented replacement for uniform sampling on Q.
pub fn sample_int_scalar(spec: FieldSpec, rng: &mut impl Rng, bound: i64) -> FieldScalar {
    FieldScalar::from_i64(spec, rng.gen_range(-bound..=bound))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Rationals
    }

    fn f(p: u64) -> FieldSpec {
        FieldSpec::prime(p).unwrap()
    }

    #[test]
    fn rational_add() {
        let a = FieldScalar::parse(q(), "1/2").unwrap();
        let b = FieldScalar::parse(q(), "1/3").unwrap();
        assert_eq!((&a + &b).to_string(), "5/6");
    }

    #[test]
    fn prime_field_add() {
        let a = FieldScalar::from_i64(f(7), 3);
        let b = FieldScalar::from_i64(f(7), 5);
        assert_eq!((&a + &b).to_string(), "1");
    }

    #[test]
    fn neg_times_neg() {
        let m = FieldScalar::from_i64(q(), -1);
        assert!((&m * &m).is_one());
        let m7 = FieldScalar::from_i64(f(7), -1);
        assert!((&m7 * &m7).is_one());
    }

    #[test]
    fn inverses() {
        assert_eq!(FieldScalar::from_i64(f(7), 3).inv().unwrap().to_string(), "5");
        assert!(FieldScalar::one(q()).inv().unwrap().is_one());
        let r = FieldScalar::parse(q(), "2/3").unwrap();
        assert_eq!(r.inv().unwrap().to_string(), "3/2");
        assert_eq!(FieldScalar::zero(f(5)).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn spec_mismatch_is_an_error() {
        let a = FieldScalar::from_i64(f(5), 1);
        let b = FieldScalar::from_i64(f(7), 1);
        assert!(matches!(
            a.checked_add(&b),
            Err(Error::SpecMismatch { .. })
        ));
        let c = FieldScalar::one(q());
        assert!(a.checked_mul(&c).is_err());
    }

    #[test]
    fn primality_checked() {
        assert!(FieldSpec::prime(9).is_err());
        assert!(FieldSpec::prime(1).is_err());
        assert!(FieldSpec::prime(1 << 31).is_err());
        assert!(FieldSpec::prime(2147483647).is_ok()); // 2^31 - 1 is prime
        assert!(FieldSpec::prime(2).is_ok());
    }

    #[test]
    fn fermat_little_theorem_spot_check() {
        for &p in &[2u64, 3, 5, 7, 11, 13] {
            let spec = f(p);
            let mut rng = seeded_stream(p);
            for _ in 0..100 {
                let a = sample_uniform(spec, &mut rng).unwrap();
                if a.is_zero() {
                    continue;
                }
                assert!(a.pow(p - 1).is_one(), "a^(p-1) != 1 for a={a} p={p}");
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_streamed() {
        let spec = f(7);
        let mut r1 = seeded_stream(0);
        let mut r2 = seeded_stream(0);
        let a1 = sample_uniform(spec, &mut r1).unwrap();
        let a2 = sample_uniform(spec, &mut r2).unwrap();
        assert_eq!(a1, a2);
        // advancing one shared stream gives fresh draws
        let draws: Vec<_> = (0..32)
            .map(|_| sample_uniform(f(2), &mut r1).unwrap().residue().unwrap())
            .collect();
        assert!(draws.iter().any(|&v| v == 0) && draws.iter().any(|&v| v == 1));
        assert!(sample_uniform(q(), &mut r1).is_err());
    }

    #[test]
    fn rational_expression_dag_is_reproducible() {
        let run = || {
            let mut acc = FieldScalar::zero(q());
            for i in 1..=20i64 {
                let t = FieldScalar::from_ratio(q(), &BigInt::from(1), &BigInt::from(i)).unwrap();
                acc = &acc + &(&t * &t);
            }
            acc.to_string()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn token_round_trip() {
        for tok in ["Q", "Fp:7", "Fp:2"] {
            assert_eq!(FieldSpec::parse_token(tok).unwrap().to_string(), tok);
        }
        assert!(FieldSpec::parse_token("Fp:8").is_err());
        assert!(FieldSpec::parse_token("R").is_err());
    }

    #[test]
    fn map_spec_reduction() {
        let r = FieldScalar::parse(q(), "2/3").unwrap();
        let m = r.map_spec(f(7)).unwrap();
        assert_eq!(m.to_string(), "3"); // 2 * 3^{-1} = 2 * 5 = 10 = 3 mod 7
        let bad = FieldScalar::parse(q(), "1/7").unwrap();
        assert!(bad.map_spec(f(7)).is_err());
        let lift = FieldScalar::from_i64(f(7), 5).map_spec(q()).unwrap();
        assert_eq!(lift.to_string(), "5");
    }
}
