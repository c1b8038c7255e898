//! Dense complex matrices and the small set of kernels the rest of the crate needs.
//!
//! Storage is row-major `Vec<C64>`. Factorizations (SVD, Hermitian eigen, Schur) are
//! delegated to `nalgebra`; everything else is written out directly since the
//! matrices here are tiny (2x2 up to a few dozen rows).

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Deserializer, Serialize};

use crate::{seed, Result, TetraError, C64};

/// Relative cutoff used by [`restricted_inverse`] when callers have no better value.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Slack allowed on `||T|| <= 1` before [`defect_operator`] refuses the input.
pub const CONTRACTION_SLACK: f64 = 1e-12;

/// Eigenvalues of `I - T*T` at or below this are rounding noise and are set to zero.
pub const DEFECT_EIGEN_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Fails on a length mismatch or a
    /// non-finite entry.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(TetraError::InvalidInput(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.is_finite()) {
            return Err(TetraError::InvalidInput(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from nested rows. Panics on ragged input; meant for literals.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            assert_eq!(r.as_ref().len(), m, "ragged rows");
            data.extend_from_slice(r.as_ref());
        }
        Self {
            rows: n,
            cols: m,
            data,
        }
    }

    /// Same as [`ComplexMatrix::from_rows`] for real literals.
    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let complex: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&complex)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Copy of the `nrows x ncols` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nrows: usize, ncols: usize) -> Self {
        assert!(r0 + nrows <= self.rows && c0 + ncols <= self.cols);
        let mut out = Self::zeros(nrows, ncols);
        for i in 0..nrows {
            for j in 0..ncols {
                out[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &ComplexMatrix) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols);
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Leading principal `n x n` block.
    pub fn leading(&self, n: usize) -> Self {
        self.block(0, 0, n, n)
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    /// `self * rhs - rhs * self`
    pub fn commutator(&self, rhs: &ComplexMatrix) -> Self {
        &self.matmul(rhs) - &rhs.matmul(self)
    }

    pub fn powi(&self, k: u32) -> Self {
        assert!(self.is_square());
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.matmul(self);
        }
        out
    }

    pub(crate) fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_dmatrix(m: &DMatrix<C64>) -> Self {
        let mut out = Self::zeros(m.nrows(), m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                out[(i, j)] = m[(i, j)];
            }
        }
        out
    }

    /// Nested `[[re, im], ...]` rows, the wire format used in reports.
    pub fn to_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let z = self[(i, j)];
                        [z.re, z.im]
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * m);
        for r in rows {
            if r.len() != m {
                return Err(TetraError::InvalidInput("ragged matrix rows".into()));
            }
            data.extend(r.iter().map(|&[re, im]| C64::new(re, im)));
        }
        Self::new(n, m, data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows))?;
        for row in self.to_pairs() {
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        ComplexMatrix::from_pairs(&rows).map_err(serde::de::Error::custom)
    }
}

/// Spectral norm of `[[a, b], [c, d]]`.
///
/// Uses the eigenvalues of `A*A` written as mean plus radius, which avoids the
/// cancellation in `F^2 - 4|det|^2` near matrices with equal singular values.
pub fn operator_norm_2x2(a: C64, b: C64, c: C64, d: C64) -> f64 {
    let p = a.norm_sqr() + c.norm_sqr();
    let q = b.norm_sqr() + d.norm_sqr();
    let off = (a.conj() * b + c.conj() * d).norm();
    let half_gap = 0.5 * (p - q);
    (0.5 * (p + q) + half_gap.hypot(off)).sqrt()
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_finite() {
        return Err(TetraError::InvalidInput(
            "operator norm of a matrix with non-finite entries".into(),
        ));
    }
    Ok(norm_unchecked(m))
}

pub(crate) fn norm_unchecked(m: &ComplexMatrix) -> f64 {
    match (m.rows, m.cols) {
        (0, _) | (_, 0) => 0.0,
        (1, _) | (_, 1) => m.frobenius_norm(),
        (2, 2) => operator_norm_2x2(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]),
        _ => m.to_dmatrix().singular_values().max(),
    }
}

/// Eigen-decomposition of a Hermitian matrix: eigenvalues and the unitary whose
/// columns are the matching eigenvectors. Only the Hermitian part of `m` is used.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    assert!(m.is_square());
    let herm = &(m + &m.adjoint()).scale(C64::new(0.5, 0.0));
    let eig = herm.to_dmatrix().symmetric_eigen();
    (
        eig.eigenvalues.iter().copied().collect(),
        ComplexMatrix::from_dmatrix(&eig.eigenvectors),
    )
}

/// `U diag(f(lambda)) U*` for a Hermitian matrix.
fn hermitian_function(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let (vals, u) = hermitian_eigen(m);
    let mapped: Vec<C64> = vals.iter().map(|&v| C64::new(f(v), 0.0)).collect();
    u.matmul(&ComplexMatrix::from_diagonal(&mapped))
        .matmul(&u.adjoint())
}

/// `(I - T*T)^{1/2}`.
///
/// Eigenvalues of `I - T*T` inside the rounding band (below [`DEFECT_EIGEN_FLOOR`],
/// including slightly negative ones) are clamped to zero.
pub fn defect_operator(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !t.is_square() {
        return Err(TetraError::InvalidInput(format!(
            "defect operator of a non-square {}x{} matrix",
            t.rows, t.cols
        )));
    }
    let norm = operator_norm(t)?;
    if norm > 1.0 + CONTRACTION_SLACK {
        return Err(TetraError::NotAContraction { norm });
    }
    let gap = &ComplexMatrix::identity(t.rows) - &t.adjoint().matmul(t);
    Ok(hermitian_function(&gap, |v| {
        if v <= DEFECT_EIGEN_FLOOR {
            0.0
        } else {
            v.sqrt()
        }
    }))
}

/// Moore-Penrose inverse of a Hermitian positive semidefinite matrix.
///
/// Eigenvalues at or below `tol * largest` are treated as zero, so the result
/// inverts `m` on its numerical range and vanishes on the numerical kernel.
pub fn restricted_inverse(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    assert!(m.is_square(), "restricted_inverse needs a square matrix");
    let (vals, u) = hermitian_eigen(m);
    let top = vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let cut = tol * top;
    let inv: Vec<C64> = vals
        .iter()
        .map(|&v| {
            if top > 0.0 && v.abs() > cut {
                C64::new(1.0 / v, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .collect();
    u.matmul(&ComplexMatrix::from_diagonal(&inv))
        .matmul(&u.adjoint())
}

/// Orthonormal basis (as columns) of the numerical range of a Hermitian PSD matrix.
pub fn range_basis(m: &ComplexMatrix, tol: f64) -> ComplexMatrix {
    let (vals, u) = hermitian_eigen(m);
    let top = vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let keep: Vec<usize> = (0..vals.len())
        .filter(|&i| top > 0.0 && vals[i].abs() > tol * top)
        .collect();
    let mut basis = ComplexMatrix::zeros(m.rows, keep.len());
    for (c, &k) in keep.iter().enumerate() {
        for r in 0..m.rows {
            basis[(r, c)] = u[(r, k)];
        }
    }
    basis
}

/// Haar-distributed `dim x dim` unitary, deterministic in `seed`.
///
/// Gram-Schmidt orthonormalization of a complex Gaussian matrix, column by column
/// with one re-orthogonalization pass. The implied triangular factor has a positive
/// real diagonal, which is the phase normalization that makes the result Haar.
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    assert!(dim >= 1, "random_unitary needs dim >= 1");
    let mut rng = seed::rng(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<C64> = (0..dim)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re * scale, im * scale)
            })
            .collect();
        for _ in 0..2 {
            for q in &cols {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // A Gaussian draw lands in the span of earlier columns with probability zero;
        // redraw rather than divide by a tiny norm.
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, &z) in col.iter().enumerate() {
            u[(i, j)] = z;
        }
    }
    u
}

/// Complex Gaussian matrix with unit-variance entries.
pub fn random_gaussian(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let mut rng = seed::rng(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let data = (0..rows * cols)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re * scale, im * scale)
        })
        .collect();
    ComplexMatrix { rows, cols, data }
}

pub fn determinant(m: &ComplexMatrix) -> C64 {
    assert!(m.is_square());
    match m.rows {
        0 => C64::new(1.0, 0.0),
        1 => m[(0, 0)],
        2 => m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)],
        _ => m.to_dmatrix().determinant(),
    }
}
