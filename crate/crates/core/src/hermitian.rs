//! Hermitian operators on `C^n`, their spectra, and coordinates of the real
//! vector space of Hermitian matrices.
//!
//! The space of `n x n` Hermitian matrices is an `n^2`-dimensional real vector
//! space with inner product `<A, B> = tr(AB)`. [`HermitianBasis`] fixes one
//! orthonormal basis of it; every `OperatorMap` is a real matrix in
//! those coordinates, so the ordering below is part of the file format:
//!
//! ```text
//! index 0..n          D_j  = E_jj
//! then for j < k (lexicographic), two entries each:
//!                     S_jk = (E_jk + E_kj) / sqrt(2)
//!                     A_jk = (i E_kj - i E_jk) / sqrt(2)
//! ```

use std::f64::consts::SQRT_2;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::json;
use crate::tol;

pub type CMatrix = DMatrix<Complex64>;

/// A square complex matrix equal to its conjugate transpose.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    /// Validates symmetry within [`tol::SYM`] and stores the exactly
    /// symmetrized matrix.
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                found: mat.ncols(),
            });
        }
        let deviation = (&mat - mat.adjoint()).norm();
        if deviation > tol::SYM {
            return Err(Error::NonHermitianInput { deviation });
        }
        Ok(Self::symmetrized(mat))
    }

    /// Symmetrizes without checking. Used for products known to be Hermitian
    /// up to rounding.
    pub(crate) fn symmetrized(mat: CMatrix) -> Self {
        let adj = mat.adjoint();
        Self {
            mat: (mat + adj) * Complex64::new(0.5, 0.0),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            mat: CMatrix::zeros(n, n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mat: CMatrix::identity(n, n),
        }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut mat = CMatrix::zeros(n, n);
        for (j, &d) in diag.iter().enumerate() {
            mat[(j, j)] = Complex64::new(d, 0.0);
        }
        Self { mat }
    }

    /// Builds a Hermitian matrix from real entries; fails unless symmetric.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let mat = CMatrix::from_fn(n, n, |r, c| Complex64::new(rows[r][c], 0.0));
        Self::new(mat)
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|j| self.mat[(j, j)].re).sum()
    }

    pub fn norm(&self) -> f64 {
        self.mat.norm()
    }

    /// Entrywise complex conjugate (equivalently, the transpose).
    pub fn conjugate(&self) -> Self {
        Self {
            mat: self.mat.map(|z| z.conj()),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            mat: &self.mat * Complex64::new(s, 0.0),
        }
    }

    /// `M A M*` for an arbitrary (not necessarily square) `M`.
    pub fn congruence(&self, m: &CMatrix) -> Self {
        Self::symmetrized(m * &self.mat * m.adjoint())
    }

    /// Product `AB`, which is Hermitian only when the factors commute.
    pub fn product(&self, other: &Self) -> CMatrix {
        &self.mat * &other.mat
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: Self) -> HermitianOperator {
        HermitianOperator {
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: Self) -> HermitianOperator {
        HermitianOperator {
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scale(rhs)
    }
}

impl Serialize for HermitianOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        json::matrix_rows(&self.mat).serialize(s)
    }
}

impl<'de> Deserialize<'de> for HermitianOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = json::ComplexRows::deserialize(d)?;
        let mat = json::matrix_from_rows(&rows).map_err(serde::de::Error::custom)?;
        HermitianOperator::new(mat).map_err(serde::de::Error::custom)
    }
}

/// Eigenvalues in descending order with a unitary matrix of eigenvectors.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    /// `V diag(lambda) V*`.
    pub fn reconstruct(&self) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &l) in self.eigenvalues.iter().enumerate() {
            for z in scaled.column_mut(j).iter_mut() {
                *z *= l;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }
}

/// Spectral decomposition. Ties in the eigenvalues are ordered by the
/// eigenvectors' real parts, lexicographically; within a degenerate
/// eigenspace the basis is arbitrary.
pub fn spectral_decompose(a: &HermitianOperator) -> Spectrum {
    let n = a.dim();
    if n == 0 {
        return Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: CMatrix::zeros(0, 0),
        };
    }
    let eig = a.mat.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then_with(|| {
            let vi = eig.eigenvectors.column(i);
            let vj = eig.eigenvectors.column(j);
            vi.iter()
                .zip(vj.iter())
                .map(|(x, y)| x.re.total_cmp(&y.re))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Spectrum {
        eigenvalues,
        eigenvectors,
    }
}

/// Number of eigenvalues with `|lambda| > tol`.
pub fn rank_eps(a: &HermitianOperator, tol: f64) -> usize {
    spectral_decompose(a)
        .eigenvalues
        .iter()
        .filter(|l| l.abs() > tol)
        .count()
}

/// `|A^2 - A|_F`.
pub fn idempotency_residual(a: &HermitianOperator) -> f64 {
    (a.product(a) - &a.mat).norm()
}

/// Tests `|A^2 - A|_F <= tol`; on success also reports the rank.
///
/// Eigenvalues of a near-projection cluster at 0 and 1, so the rank is
/// counted with the midpoint 1/2 as threshold.
pub fn is_projection(a: &HermitianOperator, tol: f64) -> (bool, Option<usize>) {
    if idempotency_residual(a) <= tol {
        (true, Some(rank_eps(a, 0.5)))
    } else {
        (false, None)
    }
}

/// The canonical orthonormal basis of `n x n` Hermitian matrices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HermitianBasis {
    n: usize,
}

/// Which family a basis index belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisElement {
    Diagonal(usize),
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
}

impl HermitianBasis {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Real dimension `n^2`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn pair_index(&self, j: usize, k: usize) -> usize {
        debug_assert!(j < k && k < self.n);
        j * self.n - j * (j + 1) / 2 + (k - j - 1)
    }

    pub fn diagonal_index(&self, j: usize) -> usize {
        j
    }

    pub fn symmetric_index(&self, j: usize, k: usize) -> usize {
        self.n + 2 * self.pair_index(j, k)
    }

    pub fn antisymmetric_index(&self, j: usize, k: usize) -> usize {
        self.symmetric_index(j, k) + 1
    }

    pub fn describe(&self, index: usize) -> BasisElement {
        assert!(index < self.len(), "basis index out of range");
        if index < self.n {
            return BasisElement::Diagonal(index);
        }
        let p = (index - self.n) / 2;
        let mut count = 0;
        for j in 0..self.n {
            let row = self.n - j - 1;
            if p < count + row {
                let k = j + 1 + (p - count);
                return if (index - self.n).is_multiple_of(2) {
                    BasisElement::Symmetric(j, k)
                } else {
                    BasisElement::Antisymmetric(j, k)
                };
            }
            count += row;
        }
        unreachable!()
    }

    pub fn element(&self, index: usize) -> HermitianOperator {
        let n = self.n;
        let mut mat = CMatrix::zeros(n, n);
        let h = 1.0 / SQRT_2;
        match self.describe(index) {
            BasisElement::Diagonal(j) => mat[(j, j)] = Complex64::new(1.0, 0.0),
            BasisElement::Symmetric(j, k) => {
                mat[(j, k)] = Complex64::new(h, 0.0);
                mat[(k, j)] = Complex64::new(h, 0.0);
            }
            BasisElement::Antisymmetric(j, k) => {
                mat[(k, j)] = Complex64::new(0.0, h);
                mat[(j, k)] = Complex64::new(0.0, -h);
            }
        }
        HermitianOperator { mat }
    }
}

/// Coordinates `c_a = tr(A B_a)` in the canonical basis.
pub fn real_coords(a: &HermitianOperator, basis: &HermitianBasis) -> Result<DVector<f64>> {
    let n = basis.dim();
    if a.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.dim(),
        });
    }
    let mut c = DVector::zeros(n * n);
    for j in 0..n {
        c[j] = a.mat[(j, j)].re;
    }
    let mut idx = n;
    for j in 0..n {
        for k in (j + 1)..n {
            let z = a.mat[(j, k)];
            c[idx] = SQRT_2 * z.re;
            c[idx + 1] = -SQRT_2 * z.im;
            idx += 2;
        }
    }
    Ok(c)
}

/// Inverse of [`real_coords`]; the result is Hermitian by construction.
pub fn from_coords(c: &DVector<f64>, basis: &HermitianBasis) -> Result<HermitianOperator> {
    let n = basis.dim();
    if c.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: c.len(),
        });
    }
    let mut mat = CMatrix::zeros(n, n);
    for j in 0..n {
        mat[(j, j)] = Complex64::new(c[j], 0.0);
    }
    let mut idx = n;
    for j in 0..n {
        for k in (j + 1)..n {
            let z = Complex64::new(c[idx], -c[idx + 1]) / SQRT_2;
            mat[(j, k)] = z;
            mat[(k, j)] = z.conj();
            idx += 2;
        }
    }
    Ok(HermitianOperator { mat })
}
