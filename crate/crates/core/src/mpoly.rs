//! Sparse multivariate polynomials over a field: arithmetic, evaluation,
//! formal gradients, and exact division by a linear form. Exponents are
//! packed into nibbles of a u64 with the total degree in the top bits, so
//! the natural key order is graded lexicographic.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::field::{FieldScalar, FieldSpec};
use crate::linalg::RingElem;

pub const MAX_VARS: usize = 14;
const DEG_SHIFT: u32 = 56;

/// Packed monomial: total degree in bits 56.., exponent of `x_{i+1}` in the
/// nibble `(13 - i) * 4`, so that bigger keys are graded-lex larger with
/// x1 > x2 > ... .
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono(u64);

impl Mono {
    pub fn one() -> Mono {
        Mono(0)
    }

    pub fn from_exponents(exps: &[u32]) -> Mono {
        debug_assert!(exps.len() <= MAX_VARS);
        let mut key = 0u64;
        let mut deg = 0u64;
        for (i, &e) in exps.iter().enumerate() {
            debug_assert!(e < 16, "exponent overflow (need < 16)");
            deg += e as u64;
            key |= (e as u64) << ((MAX_VARS - 1 - i) * 4);
        }
        Mono(key | (deg << DEG_SHIFT))
    }

    pub fn exponent(&self, i: usize) -> u32 {
        ((self.0 >> ((MAX_VARS - 1 - i) * 4)) & 0xf) as u32
    }

    pub fn degree(&self) -> u32 {
        (self.0 >> DEG_SHIFT) as u32
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0 + other.0)
    }

    /// Quotient monomial, if `other` divides `self`.
    fn try_div(&self, other: &Mono, nvars: usize) -> Option<Mono> {
        for i in 0..nvars {
            if self.exponent(i) < other.exponent(i) {
                return None;
            }
        }
        Some(Mono(self.0 - other.0))
    }
}

/// Sparse polynomial in `nvars` variables with coefficients in one field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MPoly {
    nvars: usize,
    spec: FieldSpec,
    terms: BTreeMap<Mono, FieldScalar>,
}

impl MPoly {
    pub fn zero(spec: FieldSpec, nvars: usize) -> MPoly {
        assert!(nvars <= MAX_VARS);
        MPoly { nvars, spec, terms: BTreeMap::new() }
    }

    pub fn constant(spec: FieldSpec, nvars: usize, c: FieldScalar) -> MPoly {
        let mut p = MPoly::zero(spec, nvars);
        p.add_term(Mono::one(), c);
        p
    }

    pub fn one(spec: FieldSpec, nvars: usize) -> MPoly {
        MPoly::constant(spec, nvars, FieldScalar::one(spec))
    }

    /// The variable `x_{i+1}` (0-based i).
    pub fn var(spec: FieldSpec, nvars: usize, i: usize) -> MPoly {
        assert!(i < nvars);
        let mut exps = vec![0u32; nvars];
        exps[i] = 1;
        let mut p = MPoly::zero(spec, nvars);
        p.add_term(Mono::from_exponents(&exps), FieldScalar::one(spec));
        p
    }

    pub fn from_terms<I>(spec: FieldSpec, nvars: usize, terms: I) -> Result<MPoly>
    where
        I: IntoIterator<Item = (Vec<u32>, FieldScalar)>,
    {
        let mut p = MPoly::zero(spec, nvars);
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::shape("exponent vector length mismatch"));
            }
            if c.spec() != spec {
                return Err(Error::SpecMismatch {
                    left: spec.to_string(),
                    right: c.spec().to_string(),
                });
            }
            p.add_term(Mono::from_exponents(&exps), c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mono, &FieldScalar)> {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    pub fn coeff(&self, exps: &[u32]) -> FieldScalar {
        self.terms
            .get(&Mono::from_exponents(exps))
            .cloned()
            .unwrap_or_else(|| FieldScalar::zero(self.spec))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree())
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|m| m.degree());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|e| e == d),
        }
    }

    fn add_term(&mut self, m: Mono, c: FieldScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            None => {
                self.terms.insert(m, c);
            }
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
        }
    }

    fn check_compatible(&self, other: &MPoly) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::shape("variable count mismatch"));
        }
        if self.spec != other.spec {
            return Err(Error::SpecMismatch {
                left: self.spec.to_string(),
                right: other.spec.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &MPoly) -> Result<MPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MPoly) -> Result<MPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MPoly {
        let mut out = MPoly::zero(self.spec, self.nvars);
        for (m, c) in self.terms() {
            out.terms.insert(m, c.negate());
        }
        out
    }

    pub fn scale(&self, c: &FieldScalar) -> MPoly {
        let mut out = MPoly::zero(self.spec, self.nvars);
        if c.is_zero() {
            return out;
        }
        for (m, v) in self.terms() {
            out.add_term(m, v * c);
        }
        out
    }

    pub fn mul(&self, other: &MPoly) -> Result<MPoly> {
        self.check_compatible(other)?;
        let mut out = MPoly::zero(self.spec, self.nvars);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                out.add_term(ma.mul(&mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[FieldScalar]) -> Result<FieldScalar> {
        if point.len() != self.nvars {
            return Err(Error::shape("evaluation point length mismatch"));
        }
        for c in point {
            if c.spec() != self.spec {
                return Err(Error::SpecMismatch {
                    left: self.spec.to_string(),
                    right: c.spec().to_string(),
                });
            }
        }
        let mut acc = FieldScalar::zero(self.spec);
        for (m, c) in self.terms() {
            let mut t = c.clone();
            for (i, x) in point.iter().enumerate() {
                let e = m.exponent(i);
                if e > 0 {
                    t = &t * &x.pow(e as u64);
                }
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// Formal partial derivative in `x_{i+1}`. In characteristic p the
    /// exponent multiple reduces mod p (e.g. d/dx of x^3 is 0 over F_3).
    pub fn partial(&self, i: usize) -> MPoly {
        assert!(i < self.nvars);
        let mut out = MPoly::zero(self.spec, self.nvars);
        for (m, c) in self.terms() {
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents(self.nvars);
            exps[i] -= 1;
            let factor = FieldScalar::from_i64(self.spec, e as i64);
            out.add_term(Mono::from_exponents(&exps), c * &factor);
        }
        out
    }

    pub fn gradient(&self) -> Vec<MPoly> {
        (0..self.nvars).map(|i| self.partial(i)).collect()
    }

    /// Exact division by a nonzero linear form; errors (carrying the
    /// remainder) when the division is not exact. For a single variable the
    /// quotient is a plain exponent shift.
    pub fn divide_exact(&self, lin: &MPoly) -> Result<MPoly> {
        self.check_compatible(lin)?;
        if lin.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if lin.total_degree() != Some(1) {
            return Err(Error::shape("divisor must be linear"));
        }
        // leading term of the divisor in graded-lex order
        let (lead_m, lead_c) = lin.terms.iter().next_back().map(|(&m, c)| (m, c.clone())).unwrap();
        let lead_inv = lead_c.inv()?;
        let mut rem = self.clone();
        let mut quot = MPoly::zero(self.spec, self.nvars);
        loop {
            let Some((&rm, rc)) = rem.terms.iter().next_back() else {
                return Ok(quot);
            };
            let Some(q) = rm.try_div(&lead_m, self.nvars) else {
                return Err(Error::NotDivisible { remainder: rem.to_string() });
            };
            let qc = rc * &lead_inv;
            let mut qpoly = MPoly::zero(self.spec, self.nvars);
            qpoly.add_term(q, qc);
            rem = rem.sub(&qpoly.mul(lin)?)?;
            quot = quot.add(&qpoly)?;
        }
    }

    /// Re-interpret coefficients in another field (see
    /// [`FieldScalar::map_spec`]).
    pub fn map_spec(&self, to: FieldSpec) -> Result<MPoly> {
        let mut out = MPoly::zero(to, self.nvars);
        for (m, c) in self.terms() {
            out.add_term(m, c.map_spec(to)?);
        }
        Ok(out)
    }

    /// Parse the canonical printed form (see `Display`).
    pub fn parse(spec: FieldSpec, nvars: usize, input: &str) -> Result<MPoly> {
        let bad = |msg: String| Error::Parse { line: 1, msg };
        let input = input.trim();
        if input == "0" {
            return Ok(MPoly::zero(spec, nvars));
        }
        let mut p = MPoly::zero(spec, nvars);
        for term in input.split(" + ") {
            let mut parts = term.split_whitespace();
            let coeff_tok = parts.next().ok_or_else(|| bad("empty term".into()))?;
            let c = FieldScalar::parse(spec, coeff_tok)?;
            let mut exps = vec![0u32; nvars];
            for v in parts {
                let body = v
                    .strip_prefix('x')
                    .ok_or_else(|| bad(format!("bad variable token `{v}`")))?;
                let (idx, e) = match body.split_once('^') {
                    Some((i, e)) => (i, e.parse().map_err(|_| bad(format!("bad exponent in `{v}`")))?),
                    None => (body, 1u32),
                };
                let idx: usize = idx.parse().map_err(|_| bad(format!("bad variable in `{v}`")))?;
                if idx == 0 || idx > nvars {
                    return Err(bad(format!("variable x{idx} out of range")));
                }
                exps[idx - 1] += e;
            }
            p.add_term(Mono::from_exponents(&exps), c);
        }
        Ok(p)
    }
}

/// Canonical printing: graded-lex order with the leading term first; each
/// term is `<coeff> x<i>^<e> ...` with unit exponents abbreviated, and terms
/// are joined by ` + `. The zero polynomial prints as `0`.
impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for i in 0..self.nvars {
                let e = m.exponent(i);
                match e {
                    0 => {}
                    1 => write!(f, " x{}", i + 1)?,
                    _ => write!(f, " x{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

impl RingElem for MPoly {
    fn re_zero(&self) -> Self {
        MPoly::zero(self.spec, self.nvars)
    }
    fn re_add(&self, other: &Self) -> Self {
        self.add(other).expect("compatible polynomials")
    }
    fn re_mul(&self, other: &Self) -> Self {
        self.mul(other).expect("compatible polynomials")
    }
    fn re_neg(&self) -> Self {
        self.neg()
    }
    fn re_is_zero(&self) -> bool {
        self.is_zero()
    }
}
