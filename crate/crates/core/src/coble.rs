//! The gamma pipeline: interpret a trivector on k^9 as a family of skew
//! matrices Phi(x), extract the Coble cubic from its sub-Pfaffians, classify
//! the rank loci pointwise over small prime fields, and check projective
//! duality certificates at smooth points.
//!
//! The cubic is pinned to a specific scalar normalization by the
//! sub-Pfaffian kernel identity `kappa_i = x_i P` with
//! `kappa_i = (-1)^{i+1} Pf_i`, which makes every printed cubic
//! byte-reproducible.

use rayon::prelude::*;

use crate::bits;
use crate::error::{Error, Result};
use crate::exterior::{Covector, Multivector};
use crate::field::{FieldScalar, FieldSpec};
use crate::linalg::{pfaffian_subsets, Matrix, SkewMatrix};
use crate::mpoly::MPoly;

const N: usize = 9;

/// The 9x9 skew matrix of linear forms `M_{jk}(x) = sum_i x_i g(e_i*, e_j*, e_k*)`.
#[derive(Debug, Clone)]
pub struct PfaffianFamily {
    spec: FieldSpec,
    entries: Vec<Vec<MPoly>>,
}

impl PfaffianFamily {
    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn entry(&self, j: usize, k: usize) -> &MPoly {
        &self.entries[j][k]
    }

    /// Evaluate the family at a point of V9* given by coordinates.
    pub fn evaluate(&self, x: &[FieldScalar]) -> Result<SkewMatrix> {
        if x.len() != N {
            return Err(Error::shape("need 9 coordinates"));
        }
        let mut vals = vec![vec![FieldScalar::zero(self.spec); N]; N];
        for j in 0..N {
            for k in 0..N {
                vals[j][k] = self.entries[j][k].eval(x)?;
            }
        }
        SkewMatrix::from_entries(self.spec, vals)
    }
}

/// Build the family from a trivector on k^9 and verify `Phi(x) x = 0` as a
/// polynomial identity.
pub fn phi_matrix(gamma: &Multivector) -> Result<PfaffianFamily> {
    if gamma.n() != N || gamma.degree() != 3 {
        return Err(Error::shape("need a trivector on k^9"));
    }
    let spec = gamma.spec();
    let mut entries = vec![vec![MPoly::zero(spec, N); N]; N];
    for (mask, v) in gamma.terms() {
        let idx = bits::mask_to_indices(mask);
        let (a, b, c) = (idx[0] - 1, idx[1] - 1, idx[2] - 1);
        // g(e_a, e_b, e_c) = v contributes x_a to M_{bc}, -x_b to M_{ac},
        // x_c to M_{ab}
        let add = |e: &mut MPoly, var: usize, coef: FieldScalar| {
            *e = e
                .add(&MPoly::var(spec, N, var).scale(&coef))
                .expect("same spec");
        };
        add(&mut entries[b][c], a, v.clone());
        add(&mut entries[a][c], b, v.negate());
        add(&mut entries[a][b], c, v.clone());
    }
    for j in 0..N {
        for k in 0..j {
            entries[j][k] = entries[k][j].neg();
        }
    }
    // Phi(x) . x = 0 identically, by antisymmetry of gamma
    for j in 0..N {
        let mut acc = MPoly::zero(spec, N);
        for k in 0..N {
            acc = acc.add(&entries[j][k].mul(&MPoly::var(spec, N, k))?)?;
        }
        if !acc.is_zero() {
            return Err(Error::Invariant(format!("Phi(x)x != 0 in row {}", j + 1)));
        }
    }
    Ok(PfaffianFamily { spec, entries })
}

/// A trivector together with its family, cubic, and gradient, ready for
/// point classification.
#[derive(Debug, Clone)]
pub struct CobleSystem {
    gamma: Multivector,
    family: PfaffianFamily,
    cubic: MPoly,
    gradient: Vec<MPoly>,
    pivot: usize,
    cross_checks: [bool; N],
}

impl CobleSystem {
    /// Extract the cubic: find the least j with `Pf_j != 0`, divide out
    /// `x_j`, and verify all nine identities `(-1)^{i+1} Pf_i = x_i P`.
    pub fn new(gamma: &Multivector) -> Result<CobleSystem> {
        let family = phi_matrix(gamma)?;
        let spec = family.spec;
        let one = MPoly::one(spec, N);
        let sub_pf = |j: usize| -> MPoly {
            let keep: Vec<usize> = (0..N).filter(|&r| r != j).collect();
            pfaffian_subsets(8, &|a, b| family.entries[keep[a]][keep[b]].clone(), &one)
        };
        let pfs: Vec<MPoly> = (0..N).map(sub_pf).collect();
        let Some(pivot) = pfs.iter().position(|p| !p.is_zero()) else {
            return Err(Error::DegenerateTrivector);
        };
        let signed = |j: usize| if j % 2 == 0 { pfs[j].clone() } else { pfs[j].neg() };
        let cubic = signed(pivot).divide_exact(&MPoly::var(spec, N, pivot))?;
        if cubic.total_degree() != Some(3) || !cubic.is_homogeneous() {
            return Err(Error::Invariant(
                "extracted cubic is not homogeneous of degree 3".into(),
            ));
        }
        let mut cross_checks = [false; N];
        for i in 0..N {
            let expect = MPoly::var(spec, N, i).mul(&cubic)?;
            cross_checks[i] = signed(i) == expect;
        }
        if cross_checks.iter().any(|&ok| !ok) {
            return Err(Error::Invariant(
                "sub-Pfaffian kernel identities failed; the cubic is ill-defined".into(),
            ));
        }
        let gradient = cubic.gradient();
        Ok(CobleSystem {
            gamma: gamma.clone(),
            family,
            cubic,
            gradient,
            pivot,
            cross_checks,
        })
    }

    pub fn gamma(&self) -> &Multivector {
        &self.gamma
    }

    pub fn spec(&self) -> FieldSpec {
        self.family.spec
    }

    pub fn family(&self) -> &PfaffianFamily {
        &self.family
    }

    pub fn cubic(&self) -> &MPoly {
        &self.cubic
    }

    /// 1-based index of the sub-Pfaffian the cubic was divided out of.
    pub fn pivot_index(&self) -> usize {
        self.pivot + 1
    }

    pub fn cross_checks(&self) -> [bool; N] {
        self.cross_checks
    }

    /// Rank of the evaluated skew matrix; always even.
    pub fn rank_at(&self, x: &[FieldScalar]) -> Result<usize> {
        if x.iter().all(|c| c.is_zero()) {
            return Err(Error::ZeroVector);
        }
        let rank = self.family.evaluate(x)?.rank();
        debug_assert!(rank % 2 == 0);
        Ok(rank)
    }

    /// Projective-duality certificate at a point: the four witness
    /// conditions of the dual-hypersurface correspondence. Failed checks
    /// are data, not errors.
    pub fn certificate(&self, y: &[FieldScalar]) -> Result<DualityCertificate> {
        let spec = self.spec();
        let piv = y.iter().position(|c| !c.is_zero()).ok_or(Error::ZeroVector)?;
        let scale = y[piv].inv()?;
        let point: Vec<FieldScalar> = y.iter().map(|c| c * &scale).collect();

        let on_cubic = self.cubic.eval(&point)?.is_zero();
        let gradient: Vec<FieldScalar> = self
            .gradient
            .iter()
            .map(|g| g.eval(&point))
            .collect::<Result<_>>()?;
        let rank_at_y = self.rank_at(&point)?;
        let smooth = gradient.iter().any(|c| !c.is_zero()) && rank_at_y == 6;

        let kernel_mat = self.family.evaluate(&point)?.to_matrix().kernel();
        let kernel: Vec<Covector> = (0..kernel_mat.rows())
            .map(|r| Covector::new(spec, kernel_mat.row(r).to_vec()))
            .collect::<Result<_>>()?;

        let mut kernel_in_tangent = true;
        for v in &kernel {
            if !v.pair(&gradient)?.is_zero() {
                kernel_in_tangent = false;
            }
        }

        // each double contraction g(v_a, v_b, -) must land in span(grad)
        let mut witness_vanishing = true;
        for a in 0..kernel.len() {
            for b in a + 1..kernel.len() {
                let w = self.gamma.contract(&kernel[a])?.contract(&kernel[b])?;
                let coords: Vec<FieldScalar> = (0..N).map(|i| w.coeff_mask(1 << i)).collect();
                let two = Matrix::from_rows(spec, vec![coords, gradient.clone()])?;
                if two.rank() > 1 {
                    witness_vanishing = false;
                }
            }
        }

        Ok(DualityCertificate {
            point,
            rank_at_y,
            kernel,
            gradient,
            on_cubic,
            smooth,
            kernel_in_tangent,
            witness_vanishing,
        })
    }

    /// First `count` smooth points of the cubic in sweep order (prime
    /// fields only): `P(y) = 0`, gradient nonzero, rank exactly 6.
    pub fn smooth_points(&self, count: usize) -> Result<Vec<Vec<FieldScalar>>> {
        self.sweep(count, |c| c.cubic_zero && !c.gradient_zero && c.rank == 6)
    }

    /// First `count` points of the rank <= 4 locus in sweep order.
    pub fn singular_points(&self, count: usize) -> Result<Vec<Vec<FieldScalar>>> {
        self.sweep(count, |c| c.rank <= 4)
    }

    fn sweep(
        &self,
        count: usize,
        keep: impl Fn(&PointClass) -> bool,
    ) -> Result<Vec<Vec<FieldScalar>>> {
        let FieldSpec::Prime(p) = self.spec() else {
            return Err(Error::Unsupported("point sweeps need a prime field".into()));
        };
        let compiled = CompiledSystem::new(self, p);
        let total = projective_point_count(p);
        let mut found = Vec::with_capacity(count);
        for idx in 0..total {
            if found.len() == count {
                break;
            }
            let coords = decode_point(p, idx);
            let c = compiled.classify(&coords, true);
            if keep(&c) {
                found.push(
                    coords
                        .iter()
                        .map(|&v| FieldScalar::from_i64(self.spec(), v as i64))
                        .collect(),
                );
            }
        }
        Ok(found)
    }
}

/// Record of the duality checks at one projective point.
#[derive(Debug, Clone)]
pub struct DualityCertificate {
    /// Representative with first nonzero coordinate scaled to 1.
    pub point: Vec<FieldScalar>,
    pub rank_at_y: usize,
    /// Reduced-echelon basis of `ker Phi(y)` (covectors on V9).
    pub kernel: Vec<Covector>,
    /// Gradient of the cubic at the point: the tangent covector.
    pub gradient: Vec<FieldScalar>,
    pub on_cubic: bool,
    pub smooth: bool,
    pub kernel_in_tangent: bool,
    pub witness_vanishing: bool,
}

impl DualityCertificate {
    pub fn valid(&self) -> bool {
        self.on_cubic && self.smooth && self.kernel_in_tangent && self.witness_vanishing
    }
}

/// Exhaustive classification of P^8(F_p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanReport {
    pub p: u64,
    pub points_total: u64,
    /// Points with P = 0.
    pub points_y: u64,
    /// Points with rank <= 6 (must agree with `points_y`; disagreements are
    /// listed in `cubic_rank_mismatches`).
    pub points_y_rank6: u64,
    /// Points with rank <= 4.
    pub points_x: u64,
    pub rank2_count: u64,
    /// Points where (P = 0 and grad P = 0) disagrees with rank <= 4.
    pub sing_mismatches: Vec<[u64; N]>,
    /// Points where (P = 0) disagrees with rank <= 6.
    pub cubic_rank_mismatches: Vec<[u64; N]>,
}

pub fn projective_point_count(p: u64) -> u64 {
    (p.pow(N as u32) - 1) / (p - 1)
}

/// Representative of the idx-th point of P^8(F_p) in sweep order: first
/// nonzero coordinate is 1, later coordinates run lexicographically (the
/// coordinate right after the pivot is the most significant digit).
pub fn decode_point(p: u64, idx: u64) -> [u64; N] {
    let mut idx = idx;
    let mut pivot = 0usize;
    loop {
        let block = p.pow((N - 1 - pivot) as u32);
        if idx < block {
            break;
        }
        idx -= block;
        pivot += 1;
    }
    let mut coords = [0u64; N];
    coords[pivot] = 1;
    for t in (pivot + 1..N).rev() {
        coords[t] = idx % p;
        idx /= p;
    }
    coords
}

struct PointClass {
    rank: usize,
    cubic_zero: bool,
    gradient_zero: bool,
}

/// Flat mod-p representation of the family, cubic, and gradient for the
/// exhaustive scans.
struct CompiledSystem {
    p: u64,
    inv: Vec<u64>,
    // upper-triangle linear entries: (j, k) -> list of (coeff, var)
    fam: Vec<Vec<Vec<(u64, usize)>>>,
    cubic: Vec<(u64, [usize; 3])>,
    grads: Vec<Vec<(u64, [usize; 2])>>,
}

impl CompiledSystem {
    fn new(sys: &CobleSystem, p: u64) -> CompiledSystem {
        let residue = |c: &FieldScalar| c.residue().expect("prime-field scalar");
        let mut inv = vec![0u64; p as usize];
        for v in 1..p {
            let mut x = 1u64;
            let mut e = p - 2;
            let mut b = v;
            while e > 0 {
                if e & 1 == 1 {
                    x = x * b % p;
                }
                b = b * b % p;
                e >>= 1;
            }
            inv[v as usize] = x;
        }
        let mut fam = vec![vec![Vec::new(); N]; N];
        for j in 0..N {
            for k in j + 1..N {
                let mut lin = Vec::new();
                for (m, c) in sys.family.entries[j][k].terms() {
                    let var = (0..N).find(|&i| m.exponent(i) == 1).expect("linear form");
                    lin.push((residue(c), var));
                }
                fam[j][k] = lin;
            }
        }
        let unpack = |m: &crate::mpoly::Mono| {
            let mut vars = Vec::new();
            for i in 0..N {
                for _ in 0..m.exponent(i) {
                    vars.push(i);
                }
            }
            vars
        };
        let cubic = sys
            .cubic
            .terms()
            .map(|(m, c)| {
                let v = unpack(&m);
                (residue(c), [v[0], v[1], v[2]])
            })
            .collect();
        let grads = sys
            .gradient
            .iter()
            .map(|g| {
                g.terms()
                    .map(|(m, c)| {
                        let v = unpack(&m);
                        (residue(c), [v[0], v[1]])
                    })
                    .collect()
            })
            .collect();
        CompiledSystem { p, inv, fam, cubic, grads }
    }

    fn classify(&self, x: &[u64; N], want_gradient: bool) -> PointClass {
        let p = self.p;
        // skew matrix at x
        let mut m = [[0u64; N]; N];
        for j in 0..N {
            for k in j + 1..N {
                let mut acc = 0u64;
                for &(c, var) in &self.fam[j][k] {
                    acc += c * x[var];
                }
                let v = acc % p;
                m[j][k] = v;
                m[k][j] = if v == 0 { 0 } else { p - v };
            }
        }
        let rank = rank_mod_p(&mut m, p, &self.inv);

        let mut pv = 0u64;
        for &(c, [a, b, d]) in &self.cubic {
            pv += c * x[a] % p * x[b] % p * x[d] % p;
        }
        let cubic_zero = pv % p == 0;

        let mut gradient_zero = cubic_zero;
        if want_gradient && cubic_zero {
            for g in &self.grads {
                let mut acc = 0u64;
                for &(c, [a, b]) in g {
                    acc += c * x[a] % p * x[b] % p;
                }
                if acc % p != 0 {
                    gradient_zero = false;
                    break;
                }
            }
        }
        PointClass { rank, cubic_zero, gradient_zero }
    }
}

fn rank_mod_p(m: &mut [[u64; N]; N], p: u64, inv: &[u64]) -> usize {
    let mut rank = 0usize;
    for col in 0..N {
        let Some(pr) = (rank..N).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, pr);
        let pinv = inv[m[rank][col] as usize];
        for r in rank + 1..N {
            if m[r][col] != 0 {
                let f = m[r][col] * pinv % p;
                for c in col..N {
                    m[r][c] = (m[r][c] + (p - f) * m[rank][c]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Default)]
struct ChunkOut {
    points_y: u64,
    points_y_rank6: u64,
    points_x: u64,
    rank2_count: u64,
    sing_mismatches: Vec<[u64; N]>,
    cubic_rank_mismatches: Vec<[u64; N]>,
}

/// Exhaustive scan of P^8(F_p) for p in {2, 3, 5, 7}. `gamma` is mapped
/// into F_p first, so a fixture over Q (or its canonical lift) can be
/// scanned at several primes. The scan is chunked; results are merged in
/// point order, so the report is independent of the thread count.
pub fn scan_loci(gamma: &Multivector, p: u64, threads: usize) -> Result<ScanReport> {
    if ![2, 3, 5, 7].contains(&p) {
        return Err(Error::Unsupported(format!(
            "scan supports p in {{2,3,5,7}}, got {p}"
        )));
    }
    let spec = FieldSpec::prime(p)?;
    let reduced = gamma.map_spec(spec)?;
    let sys = CobleSystem::new(&reduced)?;
    let compiled = CompiledSystem::new(&sys, p);
    let total = projective_point_count(p);

    const CHUNK: u64 = 1 << 16;
    let nchunks = total.div_ceil(CHUNK);
    let run_chunk = |ci: u64| -> ChunkOut {
        let mut out = ChunkOut::default();
        let lo = ci * CHUNK;
        let hi = (lo + CHUNK).min(total);
        for idx in lo..hi {
            let coords = decode_point(p, idx);
            let c = compiled.classify(&coords, true);
            let on_x = c.rank <= 4;
            let singular = c.cubic_zero && c.gradient_zero;
            if c.cubic_zero {
                out.points_y += 1;
            }
            if c.rank <= 6 {
                out.points_y_rank6 += 1;
            }
            if on_x {
                out.points_x += 1;
            }
            if c.rank <= 2 {
                out.rank2_count += 1;
            }
            if singular != on_x {
                out.sing_mismatches.push(coords);
            }
            if c.cubic_zero != (c.rank <= 6) {
                out.cubic_rank_mismatches.push(coords);
            }
        }
        out
    };

    let chunks: Vec<ChunkOut> = if threads <= 1 {
        (0..nchunks).map(run_chunk).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Unsupported(format!("thread pool: {e}")))?;
        pool.install(|| (0..nchunks).into_par_iter().map(run_chunk).collect())
    };

    let mut report = ScanReport {
        p,
        points_total: total,
        points_y: 0,
        points_y_rank6: 0,
        points_x: 0,
        rank2_count: 0,
        sing_mismatches: Vec::new(),
        cubic_rank_mismatches: Vec::new(),
    };
    for c in chunks {
        report.points_y += c.points_y;
        report.points_y_rank6 += c.points_y_rank6;
        report.points_x += c.points_x;
        report.rank2_count += c.rank2_count;
        report.sing_mismatches.extend(c.sing_mismatches);
        report.cubic_rank_mismatches.extend(c.cubic_rank_mismatches);
    }
    Ok(report)
}

/// Rank of the comultiplication map V9* -> Lambda^2 V9, i.e. of the 36x9
/// matrix whose columns are the contractions `i_{e_i*} gamma`.
pub fn comul_rank(gamma: &Multivector) -> Result<usize> {
    if gamma.n() != N || gamma.degree() != 3 {
        return Err(Error::shape("need a trivector on k^9"));
    }
    let spec = gamma.spec();
    let pair_masks: Vec<u16> = (0..1u32 << N)
        .map(|m| m as u16)
        .filter(|m| m.count_ones() == 2)
        .collect();
    let contractions: Vec<Multivector> = (1..=N)
        .map(|i| gamma.contract(&Covector::dual_basis(spec, N, i)))
        .collect::<Result<_>>()?;
    let m = Matrix::from_fn(spec, pair_masks.len(), N, |r, c| {
        contractions[c].coeff_mask(pair_masks[r])
    });
    Ok(m.rank())
}

/// Characteristic-2 dual cubic: square the trivector into Lambda^6, dualize
/// through the volume form, and run the Pfaffian construction on the dual
/// side. The resulting cubic (in coordinates on V9) vanishes exactly where
/// the quotient trivector has vanishing hyperdiscriminant.
pub fn char2_dual_cubic(gamma: &Multivector) -> Result<MPoly> {
    if gamma.n() != N || gamma.degree() != 3 {
        return Err(Error::shape("need a trivector on k^9"));
    }
    let delta = gamma.qsquare()?.volume_dual()?;
    let sys = CobleSystem::new(&delta)?;
    Ok(sys.cubic().clone())
}
