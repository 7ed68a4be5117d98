//! Sparse exterior algebra on k^n for n <= 16: wedge, contraction against
//! covectors, the characteristic-2 squaring map Q, volume-form dualizations,
//! and projection to the quotient by a vector.
//!
//! Subsets are 16-bit masks (see [`crate::bits`]); the contraction
//! convention removes the covector from the left with the 1-based position
//! sign, and every downstream sign claim in the crate is validated against
//! this single convention.

use std::collections::BTreeMap;

use crate::bits;
use crate::error::{Error, Result};
use crate::field::{FieldScalar, FieldSpec};
use crate::linalg::{Matrix, SkewMatrix};

pub const MAX_DIM: usize = 16;

/// Sparse element of the k-th exterior power of k^n. Zero coefficients are
/// never stored, so equality is plain coefficient-wise equality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multivector {
    n: usize,
    k: usize,
    spec: FieldSpec,
    terms: BTreeMap<u16, FieldScalar>,
}

impl Multivector {
    pub fn zero(spec: FieldSpec, n: usize, k: usize) -> Multivector {
        assert!(n <= MAX_DIM && k <= n);
        Multivector { n, k, spec, terms: BTreeMap::new() }
    }

    /// Basis monomial `e_S` for strictly increasing 1-based indices.
    pub fn basis(spec: FieldSpec, n: usize, indices: &[usize]) -> Result<Multivector> {
        let mask = bits::indices_to_mask(indices, n)
            .ok_or_else(|| Error::shape(format!("bad index set {indices:?} for n={n}")))?;
        let mut m = Multivector::zero(spec, n, indices.len());
        m.terms.insert(mask, FieldScalar::one(spec));
        Ok(m)
    }

    pub fn from_terms<I>(spec: FieldSpec, n: usize, k: usize, terms: I) -> Result<Multivector>
    where
        I: IntoIterator<Item = (Vec<usize>, FieldScalar)>,
    {
        let mut m = Multivector::zero(spec, n, k);
        for (indices, c) in terms {
            if indices.len() != k {
                return Err(Error::shape(format!("term {indices:?} has degree != {k}")));
            }
            let mask = bits::indices_to_mask(&indices, n)
                .ok_or_else(|| Error::shape(format!("bad index set {indices:?} for n={n}")))?;
            if c.spec() != spec {
                return Err(Error::SpecMismatch {
                    left: spec.to_string(),
                    right: c.spec().to_string(),
                });
            }
            m.add_term(mask, c);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
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

    /// Iterate `(mask, coefficient)` in ascending mask order.
    pub fn terms(&self) -> impl Iterator<Item = (u16, &FieldScalar)> {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    pub fn coeff_mask(&self, mask: u16) -> FieldScalar {
        self.terms
            .get(&mask)
            .cloned()
            .unwrap_or_else(|| FieldScalar::zero(self.spec))
    }

    pub fn coeff(&self, indices: &[usize]) -> Result<FieldScalar> {
        let mask = bits::indices_to_mask(indices, self.n)
            .ok_or_else(|| Error::shape(format!("bad index set {indices:?}")))?;
        Ok(self.coeff_mask(mask))
    }

    pub(crate) fn add_term(&mut self, mask: u16, c: FieldScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&mask) {
            None => {
                self.terms.insert(mask, c);
            }
            Some(old) => {
                let s = &old + &c;
                if !s.is_zero() {
                    self.terms.insert(mask, s);
                }
            }
        }
    }

    fn check_compatible(&self, other: &Multivector) -> Result<()> {
        if self.n != other.n {
            return Err(Error::shape(format!(
                "ambient dimension mismatch {} vs {}",
                self.n, other.n
            )));
        }
        if self.spec != other.spec {
            return Err(Error::SpecMismatch {
                left: self.spec.to_string(),
                right: other.spec.to_string(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Multivector) -> Result<Multivector> {
        self.check_compatible(other)?;
        if self.k != other.k {
            return Err(Error::shape("degree mismatch in sum"));
        }
        let mut out = self.clone();
        for (mask, c) in other.terms() {
            out.add_term(mask, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Multivector) -> Result<Multivector> {
        self.add(&other.scale(&FieldScalar::from_i64(other.spec, -1)))
    }

    pub fn scale(&self, c: &FieldScalar) -> Multivector {
        let mut out = Multivector::zero(self.spec, self.n, self.k);
        if c.is_zero() {
            return out;
        }
        for (mask, v) in self.terms() {
            out.terms.insert(mask, v * c);
        }
        out
    }

    /// Wedge product. `e_S ^ e_T = sgn(S,T) e_{S u T}` for disjoint S, T,
    /// where the sign is the parity of `#{(s,t) in S x T : s > t}`.
    pub fn wedge(&self, other: &Multivector) -> Result<Multivector> {
        self.check_compatible(other)?;
        if self.k + other.k > self.n {
            return Err(Error::shape("wedge degree exceeds ambient dimension"));
        }
        let mut out = Multivector::zero(self.spec, self.n, self.k + other.k);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                if let Some(negative) = bits::wedge_sign(ma, mb) {
                    let c = ca * cb;
                    out.add_term(ma | mb, if negative { c.negate() } else { c });
                }
            }
        }
        Ok(out)
    }

    /// Left contraction by a covector:
    /// `i_{e_i*}(e_S) = (-1)^{pos(i,S)-1} e_{S \ i}` when `i` is in `S`.
    pub fn contract(&self, x: &Covector) -> Result<Multivector> {
        if x.n != self.n {
            return Err(Error::shape("covector dimension mismatch"));
        }
        if x.spec != self.spec {
            return Err(Error::SpecMismatch {
                left: self.spec.to_string(),
                right: x.spec.to_string(),
            });
        }
        if self.k == 0 {
            return Err(Error::shape("cannot contract a scalar"));
        }
        let mut out = Multivector::zero(self.spec, self.n, self.k - 1);
        for (mask, c) in self.terms() {
            for i in bits::mask_to_indices(mask) {
                let xi = &x.coords[i - 1];
                if xi.is_zero() {
                    continue;
                }
                let sign_neg = bits::position_in(mask, i) % 2 == 1;
                let v = c * xi;
                out.add_term(mask & !(1 << (i - 1)), if sign_neg { v.negate() } else { v });
            }
        }
        Ok(out)
    }

    /// Evaluate a trivector on three covectors: `i_z . i_y . i_x`.
    /// With this convention `g(e_i*, e_j*, e_k*)` is the coefficient of
    /// `e_{ijk}` for i < j < k.
    pub fn trilinear_eval(&self, x: &Covector, y: &Covector, z: &Covector) -> Result<FieldScalar> {
        if self.k != 3 {
            return Err(Error::shape("trilinear evaluation needs degree 3"));
        }
        let w = self.contract(x)?.contract(y)?.contract(z)?;
        Ok(w.coeff_mask(0))
    }

    /// The characteristic-2 quadratic map: `Q(sum c_S e_S) = sum_{S < T}
    /// c_S c_T e_S ^ e_T`. Vanishes on basis monomials and polarizes to the
    /// wedge: `Q(v + w) = Q(v) + Q(w) + v ^ w`.
    pub fn qsquare(&self) -> Result<Multivector> {
        if self.spec.characteristic() != 2 {
            return Err(Error::WrongCharacteristic {
                required: 2,
                found: self.spec.characteristic(),
            });
        }
        if 2 * self.k > self.n {
            return Err(Error::shape("squaring exceeds ambient dimension"));
        }
        let items: Vec<(u16, &FieldScalar)> = self.terms().collect();
        let mut out = Multivector::zero(self.spec, self.n, 2 * self.k);
        for a in 0..items.len() {
            for b in a + 1..items.len() {
                let (ma, ca) = items[a];
                let (mb, cb) = items[b];
                if ma & mb == 0 {
                    // char 2: the wedge sign is immaterial
                    out.add_term(ma | mb, ca * cb);
                }
            }
        }
        Ok(out)
    }

    /// Identify degree n-2 with skew forms through the volume form:
    /// `N_{jk}` is defined by `e_j ^ e_k ^ b = N_{jk} e_{1..n}`.
    pub fn volume_pair_to_skew(&self) -> Result<SkewMatrix> {
        if self.k + 2 != self.n {
            return Err(Error::shape(format!(
                "need degree n-2 = {}, got {}",
                self.n - 2,
                self.k
            )));
        }
        let full: u16 = ((1u32 << self.n) - 1) as u16;
        let mut upper: BTreeMap<(usize, usize), FieldScalar> = BTreeMap::new();
        for (mask, c) in self.terms() {
            let comp = full & !mask;
            let idx = bits::mask_to_indices(comp);
            let (j, k) = (idx[0], idx[1]);
            let pair = bits::indices_to_mask(&[j, k], self.n).expect("complement pair");
            let negative = bits::wedge_sign(pair, mask).expect("disjoint by construction");
            let v = if negative { c.negate() } else { c.clone() };
            upper
                .entry((j - 1, k - 1))
                .and_modify(|e| *e = &*e + &v)
                .or_insert(v);
        }
        Ok(SkewMatrix::from_upper(self.spec, self.n, |i, j| {
            upper
                .get(&(i, j))
                .cloned()
                .unwrap_or_else(|| FieldScalar::zero(self.spec))
        }))
    }

    /// Complement dual through the volume form: the output coefficient on
    /// the complement T of each S is defined by `e_T ^ e_S = delta_T e_{1..n}`.
    /// The result lives on the dual space; downstream callers swap the roles
    /// of V and V* accordingly.
    pub fn volume_dual(&self) -> Result<Multivector> {
        let full: u16 = ((1u32 << self.n) - 1) as u16;
        let mut out = Multivector::zero(self.spec, self.n, self.n - self.k);
        for (mask, c) in self.terms() {
            let comp = full & !mask;
            let negative = bits::wedge_sign(comp, mask).expect("disjoint by construction");
            out.add_term(comp, if negative { c.negate() } else { c.clone() });
        }
        Ok(out)
    }

    /// Apply the linear substitution `e_i -> sum_j M_{ji} e_j` (columns of M
    /// are the images) and expand multilinearly.
    pub fn apply_linear(&self, m: &Matrix) -> Result<Multivector> {
        if m.rows() != self.n || m.cols() != self.n {
            return Err(Error::shape("substitution matrix must be n x n"));
        }
        if m.spec() != self.spec {
            return Err(Error::SpecMismatch {
                left: self.spec.to_string(),
                right: m.spec().to_string(),
            });
        }
        let columns: Vec<Multivector> = (0..self.n)
            .map(|i| {
                let mut v = Multivector::zero(self.spec, self.n, 1);
                for j in 0..self.n {
                    v.add_term(1 << j, m.get(j, i).clone());
                }
                v
            })
            .collect();
        let mut out = Multivector::zero(self.spec, self.n, self.k);
        for (mask, c) in self.terms() {
            let mut acc: Option<Multivector> = None;
            for i in bits::mask_to_indices(mask) {
                acc = Some(match acc {
                    None => columns[i - 1].clone(),
                    Some(w) => w.wedge(&columns[i - 1])?,
                });
            }
            let image = acc.expect("nonzero degree").scale(c);
            out = out.add(&image)?;
        }
        Ok(out)
    }

    /// Project to the quotient of k^n by the line spanned by `u` (nonzero).
    /// The pivot coordinate of `u` (first nonzero, scaled to 1) is
    /// eliminated via `e_piv -> -sum_{j != piv} u_j e_j`, and the remaining
    /// n-1 standard positions are renumbered in increasing order. The result
    /// is well-defined up to the GL action on the quotient; this completion
    /// makes it deterministic.
    pub fn quotient_project(&self, u: &[FieldScalar]) -> Result<Multivector> {
        if u.len() != self.n {
            return Err(Error::shape("vector length must match ambient dimension"));
        }
        let piv = u.iter().position(|c| !c.is_zero()).ok_or(Error::ZeroVector)?;
        let scale = u[piv].inv()?;
        let m = self.n - 1;
        // image of each e_i in the quotient, as a sparse vector over m coords
        let mut images: Vec<Vec<(usize, FieldScalar)>> = Vec::with_capacity(self.n);
        let quotient_pos = |i: usize| if i < piv { i } else { i - 1 };
        for i in 0..self.n {
            if i == piv {
                let mut img = Vec::new();
                for j in 0..self.n {
                    if j != piv && !u[j].is_zero() {
                        img.push((quotient_pos(j), (&u[j] * &scale).negate()));
                    }
                }
                images.push(img);
            } else {
                images.push(vec![(quotient_pos(i), FieldScalar::one(self.spec))]);
            }
        }
        let mut out = Multivector::zero(self.spec, m, self.k);
        for (mask, c) in self.terms() {
            // expand the product of images over the k indices of this term
            let idx = bits::mask_to_indices(mask);
            let mut partial: Vec<(u16, FieldScalar)> = vec![(0u16, c.clone())];
            for &i in &idx {
                let mut next: Vec<(u16, FieldScalar)> = Vec::new();
                for (pmask, pc) in &partial {
                    for (pos, ic) in &images[i - 1] {
                        let bit = 1u16 << pos;
                        if pmask & bit != 0 {
                            continue;
                        }
                        let negative = bits::wedge_sign(*pmask, bit).expect("disjoint");
                        let v = pc * ic;
                        next.push((pmask | bit, if negative { v.negate() } else { v }));
                    }
                }
                partial = next;
            }
            for (mask, v) in partial {
                out.add_term(mask, v);
            }
        }
        Ok(out)
    }

    /// Re-interpret all coefficients in another field (see
    /// [`FieldScalar::map_spec`]).
    pub fn map_spec(&self, to: FieldSpec) -> Result<Multivector> {
        let mut out = Multivector::zero(to, self.n, self.k);
        for (mask, c) in self.terms() {
            out.add_term(mask, c.map_spec(to)?);
        }
        Ok(out)
    }
}

/// Coordinates of an element of the dual space against `e_1*, ..., e_n*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Covector {
    n: usize,
    spec: FieldSpec,
    coords: Vec<FieldScalar>,
}

impl Covector {
    pub fn new(spec: FieldSpec, coords: Vec<FieldScalar>) -> Result<Covector> {
        for c in &coords {
            if c.spec() != spec {
                return Err(Error::SpecMismatch {
                    left: spec.to_string(),
                    right: c.spec().to_string(),
                });
            }
        }
        Ok(Covector { n: coords.len(), spec, coords })
    }

    /// `e_i*` (1-based).
    pub fn dual_basis(spec: FieldSpec, n: usize, i: usize) -> Covector {
        let mut coords = vec![FieldScalar::zero(spec); n];
        coords[i - 1] = FieldScalar::one(spec);
        Covector { n, spec, coords }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn coords(&self) -> &[FieldScalar] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Pairing with a vector given by coordinates.
    pub fn pair(&self, v: &[FieldScalar]) -> Result<FieldScalar> {
        if v.len() != self.n {
            return Err(Error::shape("pairing length mismatch"));
        }
        let mut acc = FieldScalar::zero(self.spec);
        for (a, b) in self.coords.iter().zip(v) {
            acc = &acc + &(a * b);
        }
        Ok(acc)
    }
}

/// Parse the trivector text format: `field <Q|Fp:p>`, `dim <n>`, then lines
/// `<i> <j> <k> <coeff>` with 1 <= i < j < k <= n. Duplicate index triples
/// are summed. Blank lines are ignored.
pub fn parse_trivector(input: &str) -> Result<Multivector> {
    let mut lines = input.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let perr = |line: usize, msg: String| Error::Parse { line: line + 1, msg };

    let (ln, l) = lines.next().ok_or(perr(0, "empty file".into()))?;
    let spec = match l.trim().strip_prefix("field ") {
        Some(tok) => FieldSpec::parse_token(tok).map_err(|e| perr(ln, e.to_string()))?,
        None => return Err(perr(ln, "expected `field <Q|Fp:p>`".into())),
    };
    let (ln, l) = lines.next().ok_or(perr(1, "missing dim line".into()))?;
    let n: usize = match l.trim().strip_prefix("dim ") {
        Some(tok) => tok.trim().parse().map_err(|_| perr(ln, "bad dimension".into()))?,
        None => return Err(perr(ln, "expected `dim <n>`".into())),
    };
    if n < 3 || n > MAX_DIM {
        return Err(perr(ln, format!("dimension {n} out of range 3..=16")));
    }

    let mut g = Multivector::zero(spec, n, 3);
    for (ln, l) in lines {
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(perr(ln, "expected `<i> <j> <k> <coeff>`".into()));
        }
        let parse_idx = |s: &str| -> Result<usize> {
            s.parse().map_err(|_| perr(ln, format!("bad index `{s}`")))
        };
        let (i, j, k) = (parse_idx(parts[0])?, parse_idx(parts[1])?, parse_idx(parts[2])?);
        if !(1 <= i && i < j && j < k && k <= n) {
            return Err(perr(ln, format!("indices must satisfy 1 <= {i} < {j} < {k} <= {n}")));
        }
        let c = FieldScalar::parse(spec, parts[3]).map_err(|e| perr(ln, e.to_string()))?;
        let mask = bits::indices_to_mask(&[i, j, k], n).expect("validated");
        g.add_term(mask, c);
    }
    Ok(g)
}

/// Canonical text form: terms sorted by (i, j, k), zero coefficients
/// omitted. Output re-parses to an equal multivector.
pub fn write_trivector(g: &Multivector) -> String {
    assert_eq!(g.degree(), 3, "text format is for trivectors");
    let mut out = format!("field {}\ndim {}\n", g.spec(), g.n());
    let mut terms: Vec<(Vec<usize>, &FieldScalar)> = g
        .terms
        .iter()
        .map(|(&m, c)| (bits::mask_to_indices(m), c))
        .collect();
    terms.sort_by(|a, b| a.0.cmp(&b.0));
    for (idx, c) in terms {
        out.push_str(&format!("{} {} {} {}\n", idx[0], idx[1], idx[2], c));
    }
    out
}
