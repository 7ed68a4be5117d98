//! Exact dense linear algebra: RREF, rank, kernel, determinant, and the
//! Pfaffian machinery for skew-symmetric matrices.
//!
//! Everything here runs over any [`FieldSpec`]. Pivoting is deterministic
//! (first nonzero entry), kernels come back in reduced echelon form, and the
//! Pfaffian is computed by memoized subset expansion, which needs no
//! division and is therefore valid verbatim in characteristic 2.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::field::{FieldScalar, FieldSpec};

/// Dense matrix over a fixed field, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    spec: FieldSpec,
    data: Vec<FieldScalar>,
}

impl Matrix {
    pub fn zeros(spec: FieldSpec, rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            spec,
            data: vec![FieldScalar::zero(spec); rows * cols],
        }
    }

    pub fn identity(spec: FieldSpec, n: usize) -> Matrix {
        let mut m = Matrix::zeros(spec, n, n);
        for i in 0..n {
            m.set(i, i, FieldScalar::one(spec));
        }
        m
    }

    pub fn from_rows(spec: FieldSpec, rows: Vec<Vec<FieldScalar>>) -> Result<Matrix> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            if row.len() != c {
                return Err(Error::shape("ragged rows"));
            }
            for e in row {
                if e.spec() != spec {
                    return Err(Error::SpecMismatch {
                        left: spec.to_string(),
                        right: e.spec().to_string(),
                    });
                }
                data.push(e.clone());
            }
        }
        Ok(Matrix { rows: r, cols: c, spec, data })
    }

    pub fn from_fn(
        spec: FieldSpec,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldScalar,
    ) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, spec, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldScalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.spec, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows || self.spec != other.spec {
            return Err(Error::shape("matrix product shape mismatch"));
        }
        Ok(Matrix::from_fn(self.spec, self.rows, other.cols, |i, j| {
            let mut acc = FieldScalar::zero(self.spec);
            for k in 0..self.cols {
                acc = &acc + &(self.get(i, k) * other.get(k, j));
            }
            acc
        }))
    }

    pub fn mul_vec(&self, v: &[FieldScalar]) -> Result<Vec<FieldScalar>> {
        if v.len() != self.cols {
            return Err(Error::shape("matrix-vector shape mismatch"));
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = FieldScalar::zero(self.spec);
                for j in 0..self.cols {
                    acc = &acc + &(self.get(i, j) * &v[j]);
                }
                acc
            })
            .collect())
    }

    /// Reduced row echelon form, plus the pivot columns.
    pub fn rref_with_pivots(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0usize;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, pr);
            let inv = m.get(r, c).inv().expect("pivot nonzero");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i != r && !m.get(i, c).is_zero() {
                    let f = m.get(i, c).clone();
                    for j in c..m.cols {
                        let v = m.get(i, j) - &(&f * m.get(r, j));
                        m.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rref(&self) -> Matrix {
        self.rref_with_pivots().0
    }

    pub fn rank(&self) -> usize {
        self.rref_with_pivots().1.len()
    }

    /// Basis of the right kernel, as the rows of a matrix in reduced echelon
    /// form (canonical, hence byte-reproducible in reports).
    pub fn kernel(&self) -> Matrix {
        let (r, pivots) = self.rref_with_pivots();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut rows = Vec::with_capacity(free.len());
        for &fcol in &free {
            let mut v = vec![FieldScalar::zero(self.spec); self.cols];
            v[fcol] = FieldScalar::one(self.spec);
            for (ri, &pcol) in pivots.iter().enumerate() {
                v[pcol] = r.get(ri, fcol).negate();
            }
            rows.push(v);
        }
        let m = Matrix::from_rows(self.spec, rows).expect("kernel rows rectangular");
        m.rref()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Inverse via RREF of the augmented matrix; errors on singular input.
    pub fn inverse(&self) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::shape("inverse of non-square matrix"));
        }
        let n = self.rows;
        let aug = Matrix::from_fn(self.spec, n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                FieldScalar::one(self.spec)
            } else {
                FieldScalar::zero(self.spec)
            }
        });
        let (r, pivots) = aug.rref_with_pivots();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::shape("matrix is singular"));
        }
        Ok(Matrix::from_fn(self.spec, n, n, |i, j| r.get(i, j + n).clone()))
    }

    pub fn det(&self) -> Result<FieldScalar> {
        if self.rows != self.cols {
            return Err(Error::shape("determinant of non-square matrix"));
        }
        let mut m = self.clone();
        let mut det = FieldScalar::one(self.spec);
        for c in 0..m.cols {
            let Some(pr) = (c..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(FieldScalar::zero(self.spec));
            };
            if pr != c {
                m.swap_rows(c, pr);
                det = det.negate();
            }
            let pivot = m.get(c, c).clone();
            det = &det * &pivot;
            let inv = pivot.inv().expect("pivot nonzero");
            for i in c + 1..m.rows {
                if !m.get(i, c).is_zero() {
                    let f = m.get(i, c) * &inv;
                    for j in c..m.cols {
                        let v = m.get(i, j) - &(&f * m.get(c, j));
                        m.set(i, j, v);
                    }
                }
            }
        }
        Ok(det)
    }
}

/// Square matrix with `S^T = -S` and zero diagonal (required explicitly so
/// characteristic 2 behaves).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkewMatrix {
    size: usize,
    spec: FieldSpec,
    data: Vec<FieldScalar>,
}

impl SkewMatrix {
    pub fn zeros(spec: FieldSpec, size: usize) -> SkewMatrix {
        SkewMatrix {
            size,
            spec,
            data: vec![FieldScalar::zero(spec); size * size],
        }
    }

    /// Build from the strict upper triangle: `upper(i, j)` for `i < j`.
    pub fn from_upper(
        spec: FieldSpec,
        size: usize,
        mut upper: impl FnMut(usize, usize) -> FieldScalar,
    ) -> SkewMatrix {
        let mut m = SkewMatrix::zeros(spec, size);
        for i in 0..size {
            for j in i + 1..size {
                let v = upper(i, j);
                m.data[i * size + j] = v.clone();
                m.data[j * size + i] = v.negate();
            }
        }
        m
    }

    /// Validate and wrap a full entry table.
    pub fn from_entries(spec: FieldSpec, entries: Vec<Vec<FieldScalar>>) -> Result<SkewMatrix> {
        let n = entries.len();
        let m = Matrix::from_rows(spec, entries)?;
        if m.cols() != n {
            return Err(Error::shape("skew matrix must be square"));
        }
        for i in 0..n {
            if !m.get(i, i).is_zero() {
                return Err(Error::shape("skew matrix needs zero diagonal"));
            }
            for j in 0..i {
                if *m.get(i, j) != m.get(j, i).negate() {
                    return Err(Error::shape("matrix is not skew-symmetric"));
                }
            }
        }
        Ok(SkewMatrix { size: n, spec, data: (0..n * n).map(|k| m.get(k / n, k % n).clone()).collect() })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn get(&self, i: usize, j: usize) -> &FieldScalar {
        &self.data[i * self.size + j]
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.spec, self.size, self.size, |i, j| self.get(i, j).clone())
    }

    pub fn rank(&self) -> usize {
        self.to_matrix().rank()
    }

    /// Pfaffian by memoized expansion along the smallest retained index:
    /// `Pf(S) = sum_j (-1)^j S_{1j} Pf(S_{1^ j^})`. Odd sizes give 0.
    pub fn pfaffian(&self) -> FieldScalar {
        if self.size % 2 == 1 {
            return FieldScalar::zero(self.spec);
        }
        let one = FieldScalar::one(self.spec);
        pfaffian_subsets(self.size, &|i, j| self.get(i, j).clone(), &one)
    }

    /// Principal sub-Pfaffian of the rows/columns selected by `keep`.
    pub fn sub_pfaffian(&self, keep: &[usize]) -> FieldScalar {
        let one = FieldScalar::one(self.spec);
        let idx: Vec<usize> = keep.to_vec();
        pfaffian_subsets(idx.len(), &|i, j| self.get(idx[i], idx[j]).clone(), &one)
    }

    /// For odd size m, the vector `kappa_j = (-1)^{j+1} Pf(S_{j^ j^})`
    /// (1-based j). It satisfies `S kappa = 0`, and is nonzero exactly when
    /// `rank(S) = m - 1`.
    pub fn sub_pfaffian_kernel(&self) -> Result<Vec<FieldScalar>> {
        if self.size % 2 == 0 {
            return Err(Error::shape("sub-Pfaffian kernel needs odd size"));
        }
        Ok((0..self.size)
            .map(|j| {
                let keep: Vec<usize> = (0..self.size).filter(|&k| k != j).collect();
                let pf = self.sub_pfaffian(&keep);
                if j % 2 == 0 {
                    pf
                } else {
                    pf.negate()
                }
            })
            .collect())
    }
}

/// Minimal ring interface so the Pfaffian expansion can run over scalars and
/// over polynomial entries alike.
pub trait RingElem: Clone {
    fn re_zero(&self) -> Self;
    fn re_add(&self, other: &Self) -> Self;
    fn re_mul(&self, other: &Self) -> Self;
    fn re_neg(&self) -> Self;
    fn re_is_zero(&self) -> bool;
}

impl RingElem for FieldScalar {
    fn re_zero(&self) -> Self {
        FieldScalar::zero(self.spec())
    }
    fn re_add(&self, other: &Self) -> Self {
        self + other
    }
    fn re_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn re_neg(&self) -> Self {
        self.negate()
    }
    fn re_is_zero(&self) -> bool {
        self.is_zero()
    }
}

/// Memoized subset expansion of the Pfaffian for an `m x m` skew matrix given
/// by an entry oracle. `one` supplies the ring's 1 for the empty base case.
pub fn pfaffian_subsets<T: RingElem>(m: usize, entry: &dyn Fn(usize, usize) -> T, one: &T) -> T {
    assert!(m <= 16, "subset expansion limited to m <= 16");
    if m % 2 == 1 {
        return one.re_zero();
    }
    let full: u32 = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
    let mut memo: HashMap<u32, T> = HashMap::new();
    pf_rec(full, entry, one, &mut memo)
}

fn pf_rec<T: RingElem>(
    mask: u32,
    entry: &dyn Fn(usize, usize) -> T,
    one: &T,
    memo: &mut HashMap<u32, T>,
) -> T {
    if mask == 0 {
        return one.clone();
    }
    if let Some(v) = memo.get(&mask) {
        return v.clone();
    }
    let first = mask.trailing_zeros() as usize;
    let rest = mask & !(1 << first);
    let mut acc = one.re_zero();
    let mut pos = 0usize; // 0-based position within `rest`
    let mut t = rest;
    while t != 0 {
        let j = t.trailing_zeros() as usize;
        t &= t - 1;
        let e = entry(first, j);
        if !e.re_is_zero() {
            let sub = pf_rec(rest & !(1 << j), entry, one, memo);
            let term = e.re_mul(&sub);
            // expansion sign alternates with the position of j among the
            // retained indices: +, -, +, ...
            acc = if pos % 2 == 0 {
                acc.re_add(&term)
            } else {
                acc.re_add(&term.re_neg())
            };
        }
        pos += 1;
    }
    memo.insert(mask, acc.clone());
    acc
}
