//! Invariant theory of trivectors on k^8: the trace trilinear form on
//! pgl_3, rank tests for its contractions, infinitesimal stabilizer
//! dimensions, the brute-force GIT instability oracle over F_2 and F_3 with
//! its witness checker and 1-parameter-subgroup weight test, and the
//! characteristic-2 hyperdiscriminant.
//!
//! A trivector w is unstable exactly when some 3-dimensional space of
//! covectors V3 annihilates it pairwise: `w(v1, v2, -) = 0` for all v1, v2
//! in V3. Over F_2 and F_3 every 3-dimensional subspace can be enumerated
//! by reduced-row-echelon representatives, which turns instability into a
//! finite search; over F_2 the hyperdiscriminant `Pf(Q(w))` vanishes on
//! exactly the unstable locus, and the two tests validate each other.
//!
//! No closed-form evaluator for the degree-16 invariant exists outside
//! characteristic 2; odd characteristic gets only the set-theoretic
//! witness test.

use rayon::prelude::*;

use crate::bits;
use crate::error::{Error, Result};
use crate::exterior::{Covector, Multivector};
use crate::field::{FieldScalar, FieldSpec};
use crate::linalg::Matrix;

const N8: usize = 8;

/// Fixed lifts of the pgl_3 basis used everywhere in this module:
/// E12, E13, E21, E23, E31, E32, H1 = E11 - E22, H2 = E22 - E33.
pub fn pgl3_basis_lifts() -> [[[i64; 3]; 3]; 8] {
    let e = |i: usize, j: usize| {
        let mut m = [[0i64; 3]; 3];
        m[i][j] = 1;
        m
    };
    [
        e(0, 1),
        e(0, 2),
        e(1, 0),
        e(1, 2),
        e(2, 0),
        e(2, 1),
        [[1, 0, 0], [0, -1, 0], [0, 0, 0]],
        [[0, 0, 0], [0, 1, 0], [0, 0, -1]],
    ]
}

type Mat3 = [[FieldScalar; 3]; 3];

fn mat3_from_i64(spec: FieldSpec, m: &[[i64; 3]; 3]) -> Mat3 {
    std::array::from_fn(|i| std::array::from_fn(|j| FieldScalar::from_i64(spec, m[i][j])))
}

fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let spec = a[0][0].spec();
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let mut acc = FieldScalar::zero(spec);
            for k in 0..3 {
                acc = &acc + &(&a[i][k] * &b[k][j]);
            }
            acc
        })
    })
}

fn mat3_trace(a: &Mat3) -> FieldScalar {
    &(&a[0][0] + &a[1][1]) + &a[2][2]
}

/// `alpha(a, b, c) = tr(abc) - tr(bac)` on lifts; adding scalar matrices to
/// any argument leaves the value unchanged.
fn alpha_eval(a: &Mat3, b: &Mat3, c: &Mat3) -> FieldScalar {
    let abc = mat3_trace(&mat3_mul(&mat3_mul(a, b), c));
    let bac = mat3_trace(&mat3_mul(&mat3_mul(b, a), c));
    &abc - &bac
}

/// An element of pgl_3 given by a 3x3 lift; equality is modulo scalar
/// multiples of the identity.
#[derive(Debug, Clone)]
pub struct PglElement {
    spec: FieldSpec,
    lift: Mat3,
}

impl PglElement {
    pub fn new(spec: FieldSpec, entries: [[FieldScalar; 3]; 3]) -> Result<PglElement> {
        for row in &entries {
            for e in row {
                if e.spec() != spec {
                    return Err(Error::SpecMismatch {
                        left: spec.to_string(),
                        right: e.spec().to_string(),
                    });
                }
            }
        }
        Ok(PglElement { spec, lift: entries })
    }

    pub fn from_i64(spec: FieldSpec, entries: [[i64; 3]; 3]) -> PglElement {
        PglElement { spec, lift: mat3_from_i64(spec, &entries) }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn lift(&self) -> &Mat3 {
        &self.lift
    }
}

impl PartialEq for PglElement {
    fn eq(&self, other: &Self) -> bool {
        if self.spec != other.spec {
            return false;
        }
        let d: Mat3 = std::array::from_fn(|i| {
            std::array::from_fn(|j| &self.lift[i][j] - &other.lift[i][j])
        });
        for i in 0..3 {
            for j in 0..3 {
                if i != j && !d[i][j].is_zero() {
                    return false;
                }
            }
        }
        d[0][0] == d[1][1] && d[1][1] == d[2][2]
    }
}

/// Evaluate the trace trilinear form on three pgl_3 elements through their
/// lifts. The value does not depend on the lifts chosen.
pub fn trace_form_value(a: &PglElement, b: &PglElement, c: &PglElement) -> Result<FieldScalar> {
    if a.spec() != b.spec() || b.spec() != c.spec() {
        return Err(Error::SpecMismatch {
            left: a.spec().to_string(),
            right: if b.spec() != a.spec() { b.spec() } else { c.spec() }.to_string(),
        });
    }
    Ok(alpha_eval(&a.lift, &b.lift, &c.lift))
}

/// The trace trilinear form on pgl_3, stored as a trivector on k^8 through
/// the fixed basis (56 coefficients).
#[derive(Debug, Clone)]
pub struct TraceForm {
    spec: FieldSpec,
    coeffs: Multivector,
}

/// Build the trace form; only n = 3 is supported here.
pub fn trace_form(n: usize, spec: FieldSpec) -> Result<TraceForm> {
    if n != 3 {
        return Err(Error::Unsupported(format!(
            "trace form is only built for n = 3, got {n}"
        )));
    }
    let lifts: Vec<Mat3> = pgl3_basis_lifts()
        .iter()
        .map(|m| mat3_from_i64(spec, m))
        .collect();
    let mut terms = Vec::new();
    for a in 0..N8 {
        for b in a + 1..N8 {
            for c in b + 1..N8 {
                let v = alpha_eval(&lifts[a], &lifts[b], &lifts[c]);
                terms.push((vec![a + 1, b + 1, c + 1], v));
            }
        }
    }
    Ok(TraceForm {
        spec,
        coeffs: Multivector::from_terms(spec, N8, 3, terms)?,
    })
}

impl TraceForm {
    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// The 56-coefficient trivector `alpha` itself.
    pub fn coeffs(&self) -> &Multivector {
        &self.coeffs
    }

    /// Rank of the 8x8 skew form `alpha(X, -, -)` on the fixed basis.
    pub fn skew_form_rank(&self, x: &PglElement) -> Result<usize> {
        if x.spec() != self.spec {
            return Err(Error::SpecMismatch {
                left: self.spec.to_string(),
                right: x.spec().to_string(),
            });
        }
        let lifts: Vec<Mat3> = pgl3_basis_lifts()
            .iter()
            .map(|m| mat3_from_i64(self.spec, m))
            .collect();
        let m = Matrix::from_fn(self.spec, N8, N8, |a, b| {
            alpha_eval(&x.lift, &lifts[a], &lifts[b])
        });
        Ok(m.rank())
    }
}

/// Dimension of the infinitesimal stabilizer `{g in gl_8 : g.w = 0}` under
/// the derivation action, computed as 64 minus the rank of the 56x64 matrix
/// of `g -> g.w`.
pub fn stabilizer_dim(w: &Multivector) -> Result<usize> {
    if w.n() != N8 || w.degree() != 3 {
        return Err(Error::shape("need a trivector on k^8"));
    }
    let spec = w.spec();
    let triple_masks: Vec<u16> = (0..1u32 << N8)
        .map(|m| m as u16)
        .filter(|m| m.count_ones() == 3)
        .collect();
    // derivation action of E_{rs} is e_r ^ (i_{e_s*} w)
    let mut cols: Vec<Multivector> = Vec::with_capacity(64);
    for r in 1..=N8 {
        for s in 1..=N8 {
            let contracted = w.contract(&Covector::dual_basis(spec, N8, s))?;
            let er = Multivector::basis(spec, N8, &[r])?;
            cols.push(er.wedge(&contracted)?);
        }
    }
    let m = Matrix::from_fn(spec, triple_masks.len(), 64, |row, col| {
        cols[col].coeff_mask(triple_masks[row])
    });
    Ok(64 - m.rank())
}

/// Outcome of the brute-force instability search.
#[derive(Debug, Clone, PartialEq)]
pub enum StabilityVerdict {
    /// A 3-dimensional annihilating space exists; `witness` holds its
    /// reduced-echelon basis rows (covectors on k^8).
    Unstable { witness: Matrix },
    NoWitnessFound,
}

/// True when all three pairwise double contractions of `w` against the rows
/// of `v3` (a 3x8 matrix of covectors) vanish identically. Works over any
/// field; errors when the rows do not span a 3-dimensional space.
pub fn check_witness(w: &Multivector, v3: &Matrix) -> Result<bool> {
    if w.n() != N8 || w.degree() != 3 {
        return Err(Error::shape("need a trivector on k^8"));
    }
    if v3.rows() != 3 || v3.cols() != N8 {
        return Err(Error::shape("witness must be a 3x8 matrix"));
    }
    if v3.rank() != 3 {
        return Err(Error::shape("witness rows must be linearly independent"));
    }
    let rows: Vec<Covector> = (0..3)
        .map(|r| Covector::new(w.spec(), v3.row(r).to_vec()))
        .collect::<Result<_>>()?;
    for a in 0..3 {
        for b in a + 1..3 {
            if !w.contract(&rows[a])?.contract(&rows[b])?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Number of 3-dimensional subspaces of F_q^8 (reduced-echelon forms).
pub fn subspace_count(q: u64) -> u64 {
    let qp = |e: u32| q.pow(e);
    ((qp(8) - 1) * (qp(7) - 1) * (qp(6) - 1)) / ((qp(3) - 1) * (qp(2) - 1) * (q - 1))
}

/// All pivot column triples in lexicographic order (0-based).
fn pivot_triples() -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..N8 {
        for b in a + 1..N8 {
            for c in b + 1..N8 {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// Free entry positions of the echelon pattern, row-major; these are the
/// mixed-radix digits of the enumeration (first position most significant).
fn free_positions(piv: [usize; 3]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (r, &p) in piv.iter().enumerate() {
        for c in p + 1..N8 {
            if !piv.contains(&c) {
                out.push((r, c));
            }
        }
    }
    out
}

fn pattern_rows(piv: [usize; 3]) -> [[u8; N8]; 3] {
    let mut rows = [[0u8; N8]; 3];
    for (r, &p) in piv.iter().enumerate() {
        rows[r][p] = 1;
    }
    rows
}

/// Decode the subspace at a global enumeration index into echelon rows.
fn subspace_at(q: u64, idx: u64) -> [[u8; N8]; 3] {
    let mut idx = idx;
    for piv in pivot_triples() {
        let free = free_positions(piv);
        let block = q.pow(free.len() as u32);
        if idx >= block {
            idx -= block;
            continue;
        }
        let mut rows = pattern_rows(piv);
        for &(r, c) in free.iter().rev() {
            rows[r][c] = (idx % q) as u8;
            idx /= q;
        }
        return rows;
    }
    panic!("subspace index out of range");
}

/// Odometer increment of the free digits; false on wrap-around (the pivot
/// pattern is exhausted).
fn advance(q: u64, free: &[(usize, usize)], rows: &mut [[u8; N8]; 3]) -> bool {
    for &(r, c) in free.iter().rev() {
        if (rows[r][c] as u64) + 1 < q {
            rows[r][c] += 1;
            return true;
        }
        rows[r][c] = 0;
    }
    false
}

fn rows_to_matrix(spec: FieldSpec, rows: &[[u8; N8]; 3]) -> Matrix {
    Matrix::from_fn(spec, 3, N8, |r, c| FieldScalar::from_i64(spec, rows[r][c] as i64))
}

/// Per-trivector tables for the fast F_2 witness test: `plane[i][j]` is the
/// bitmask of `w(e_i*, e_j*, -)`, and `prow[i][B]` xors those planes over
/// the support mask B.
struct F2Tables {
    prow: [[u8; 256]; N8],
}

impl F2Tables {
    fn new(w: &Multivector) -> F2Tables {
        let mut plane = [[0u8; N8]; N8];
        for (mask, _) in w.terms() {
            let idx = bits::mask_to_indices(mask);
            let (a, b, d) = (idx[0] - 1, idx[1] - 1, idx[2] - 1);
            plane[a][b] ^= 1 << d;
            plane[b][a] ^= 1 << d;
            plane[a][d] ^= 1 << b;
            plane[d][a] ^= 1 << b;
            plane[b][d] ^= 1 << a;
            plane[d][b] ^= 1 << a;
        }
        let mut prow = [[0u8; 256]; N8];
        for i in 0..N8 {
            for bmask in 1usize..256 {
                let low = bmask.trailing_zeros() as usize;
                prow[i][bmask] = prow[i][bmask & (bmask - 1)] ^ plane[i][low];
            }
        }
        F2Tables { prow }
    }

    #[inline]
    fn double_contract(&self, a: u8, b: u8) -> u8 {
        let mut acc = 0u8;
        let mut t = a;
        while t != 0 {
            let i = t.trailing_zeros() as usize;
            t &= t - 1;
            acc ^= self.prow[i][b as usize];
        }
        acc
    }

    #[inline]
    fn is_witness(&self, r: [u8; 3]) -> bool {
        self.double_contract(r[0], r[1]) == 0
            && self.double_contract(r[0], r[2]) == 0
            && self.double_contract(r[1], r[2]) == 0
    }
}

const POW3: [usize; 9] = [1, 3, 9, 27, 81, 243, 729, 2187, 6561];

/// Per-trivector tables for the F_3 witness test: `prow[i][B]` is
/// `sum_j B_j w(e_i*, e_j*, -)` indexed by the base-3 encoding of row B
/// (column 0 most significant).
struct F3Tables {
    prow: Vec<[u8; N8]>, // 8 * 3^8 entries
}

impl F3Tables {
    fn new(w: &Multivector) -> F3Tables {
        // planes[i][j][m] = w(e_i*, e_j*, e_m*) in {0, 1, 2}
        let mut planes = [[[0u8; N8]; N8]; N8];
        for (mask, c) in w.terms() {
            let v = c.residue().expect("F_3 scalar") as u8;
            let neg = (3 - v) % 3;
            let idx = bits::mask_to_indices(mask);
            let (a, b, d) = (idx[0] - 1, idx[1] - 1, idx[2] - 1);
            for (i, j, m, val) in [
                (a, b, d, v),
                (b, d, a, v),
                (d, a, b, v),
                (b, a, d, neg),
                (a, d, b, neg),
                (d, b, a, neg),
            ] {
                planes[i][j][m] = val;
            }
        }
        let mut prow = vec![[0u8; N8]; N8 * POW3[8]];
        for i in 0..N8 {
            for bidx in 1..POW3[8] {
                // strip the least significant nonzero digit (column 7 has
                // weight 1)
                let mut k = 0usize;
                while (bidx / POW3[k]) % 3 == 0 {
                    k += 1;
                }
                let digit = ((bidx / POW3[k]) % 3) as u8;
                let col = 7 - k;
                let rest = bidx - (digit as usize) * POW3[k];
                let mut out = prow[i * POW3[8] + rest];
                for m in 0..N8 {
                    out[m] = (out[m] + digit * planes[i][col][m]) % 3;
                }
                prow[i * POW3[8] + bidx] = out;
            }
        }
        F3Tables { prow }
    }

    #[inline]
    fn double_contract_zero(&self, a: &[u8; N8], bidx: usize) -> bool {
        let mut acc = [0u16; N8];
        for (i, &ai) in a.iter().enumerate() {
            if ai != 0 {
                let row = &self.prow[i * POW3[8] + bidx];
                for m in 0..N8 {
                    acc[m] += (ai as u16) * row[m] as u16;
                }
            }
        }
        acc.iter().all(|&v| v % 3 == 0)
    }
}

fn row_base3_index(row: &[u8; N8]) -> usize {
    row.iter().fold(0usize, |acc, &d| acc * 3 + d as usize)
}

enum WitnessTables {
    F2(F2Tables),
    F3(F3Tables),
}

impl WitnessTables {
    #[inline]
    fn is_witness(&self, rows: &[[u8; N8]; 3]) -> bool {
        match self {
            WitnessTables::F2(t) => {
                let masks: [u8; 3] =
                    std::array::from_fn(|r| (0..N8).fold(0u8, |m, c| m | (rows[r][c] << c)));
                t.is_witness(masks)
            }
            WitnessTables::F3(t) => {
                let b1 = row_base3_index(&rows[1]);
                let b2 = row_base3_index(&rows[2]);
                t.double_contract_zero(&rows[0], b1)
                    && t.double_contract_zero(&rows[0], b2)
                    && t.double_contract_zero(&rows[1], b2)
            }
        }
    }
}

/// Brute-force instability search over F_2 (97,155 subspaces) or F_3
/// (25,095,280 subspaces): enumerate every 3-dimensional subspace of the
/// dual by reduced-echelon representatives and return the first witness in
/// enumeration order. Chunks of the index space may run in parallel; the
/// verdict is the minimum-index witness regardless of schedule.
pub fn is_unstable_bruteforce(w: &Multivector, threads: usize) -> Result<StabilityVerdict> {
    if w.n() != N8 || w.degree() != 3 {
        return Err(Error::shape("need a trivector on k^8"));
    }
    let q = match w.spec() {
        FieldSpec::Prime(q) if q == 2 || q == 3 => q,
        other => {
            return Err(Error::Unsupported(format!(
                "brute force supports F_2 and F_3, got {other}"
            )))
        }
    };
    let total = subspace_count(q);
    const CHUNK: u64 = 1 << 15;
    let nchunks = total.div_ceil(CHUNK);
    let tables = if q == 2 {
        WitnessTables::F2(F2Tables::new(w))
    } else {
        WitnessTables::F3(F3Tables::new(w))
    };

    let triples = pivot_triples();
    let block_starts: Vec<u64> = {
        let mut acc = 0u64;
        let mut out = Vec::with_capacity(triples.len());
        for &piv in &triples {
            out.push(acc);
            acc += q.pow(free_positions(piv).len() as u32);
        }
        out
    };

    let scan_chunk = |ci: u64| -> Option<(u64, [[u8; N8]; 3])> {
        let lo = ci * CHUNK;
        let hi = (lo + CHUNK).min(total);
        let mut ti = match block_starts.binary_search(&lo) {
            Ok(t) => t,
            Err(t) => t - 1,
        };
        let mut free = free_positions(triples[ti]);
        let mut rows = subspace_at(q, lo);
        for idx in lo..hi {
            if tables.is_witness(&rows) {
                return Some((idx, rows));
            }
            if idx + 1 < hi && !advance(q, &free, &mut rows) {
                ti += 1;
                free = free_positions(triples[ti]);
                rows = pattern_rows(triples[ti]);
            }
        }
        None
    };

    let threads = threads.max(1);
    let spec = w.spec();
    if threads == 1 {
        for ci in 0..nchunks {
            if let Some((_, rows)) = scan_chunk(ci) {
                return Ok(StabilityVerdict::Unstable {
                    witness: rows_to_matrix(spec, &rows),
                });
            }
        }
        return Ok(StabilityVerdict::NoWitnessFound);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
    let mut ci = 0u64;
    while ci < nchunks {
        let batch_end = (ci + threads as u64).min(nchunks);
        let found = pool.install(|| {
            (ci..batch_end)
                .into_par_iter()
                .filter_map(scan_chunk)
                .min_by_key(|&(idx, _)| idx)
        });
        if let Some((_, rows)) = found {
            return Ok(StabilityVerdict::Unstable {
                witness: rows_to_matrix(spec, &rows),
            });
        }
        ci = batch_end;
    }
    Ok(StabilityVerdict::NoWitnessFound)
}

/// Minimal 1-parameter-subgroup weight of `w` against a 5-dimensional
/// subspace U of k^8: rewrite `w` in a basis adapted to U (echelon rows of
/// U first, standard completion last), weight each index +3 when it lies in
/// the U block and -5 otherwise, and take the minimum over the support.
/// `w` is destabilized by the associated cocharacter exactly when the
/// minimum is >= 1. The zero trivector returns 9 (the maximum weight; it is
/// trivially destabilized).
pub fn min_1ps_weight(w: &Multivector, u_basis: &Matrix) -> Result<i64> {
    if w.n() != N8 || w.degree() != 3 {
        return Err(Error::shape("need a trivector on k^8"));
    }
    if u_basis.cols() != N8 {
        return Err(Error::shape("subspace basis must have 8 columns"));
    }
    let spec = w.spec();
    if u_basis.spec() != spec {
        return Err(Error::SpecMismatch {
            left: spec.to_string(),
            right: u_basis.spec().to_string(),
        });
    }
    let (rref, pivots) = u_basis.rref_with_pivots();
    if pivots.len() != 5 {
        return Err(Error::shape("subspace must be 5-dimensional"));
    }
    // adapted basis: 5 echelon rows of U, then e_c at the non-pivot columns
    let mut basis: Vec<Vec<FieldScalar>> = (0..5).map(|r| rref.row(r).to_vec()).collect();
    for c in 0..N8 {
        if !pivots.contains(&c) {
            let mut v = vec![FieldScalar::zero(spec); N8];
            v[c] = FieldScalar::one(spec);
            basis.push(v);
        }
    }
    let b = Matrix::from_fn(spec, N8, N8, |i, j| basis[j][i].clone());
    let rewritten = w.apply_linear(&b.inverse()?)?;
    let mut min: Option<i64> = None;
    for (mask, _) in rewritten.terms() {
        let weight: i64 = bits::mask_to_indices(mask)
            .iter()
            .map(|&i| if i <= 5 { 3 } else { -5 })
            .sum();
        min = Some(min.map_or(weight, |m: i64| m.min(weight)));
    }
    Ok(min.unwrap_or(9))
}

/// The characteristic-2 hyperdiscriminant value `Pf(Q(w))` of a trivector
/// on F_2^8, through the canonical volume identification. It vanishes
/// exactly when `w` is unstable; its square is the degree-16 invariant.
pub fn hyperdisc2(w: &Multivector) -> Result<FieldScalar> {
    if w.n() != N8 || w.degree() != 3 {
        return Err(Error::shape("need a trivector on k^8"));
    }
    if w.spec().characteristic() != 2 {
        return Err(Error::WrongCharacteristic {
            required: 2,
            found: w.spec().characteristic(),
        });
    }
    Ok(w.qsquare()?.volume_pair_to_skew()?.pfaffian())
}
