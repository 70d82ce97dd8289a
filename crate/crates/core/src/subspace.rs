//! Subspaces of `C^n` as orthonormal frames, with the lattice operations
//! (meet, join, orthocomplement), principal angles and compatibility.
//!
//! Meets and joins are both read off one SVD, that of `(I - P_A) B` where
//! `A` is the frame of larger rank. Its singular values are the sines of the
//! principal angles; right singular vectors with (numerically) zero sine give
//! the principal vectors of `A ∩ B`, left singular vectors with nonzero sine
//! complete `A` to a basis of `A + B`. Using the same decomposition for both
//! keeps `dim(A ∩ B) + dim(A + B) = dim A + dim B` exact under rounding.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hermitian::{is_projection, spectral_decompose, CMatrix, HermitianOperator};
use crate::json;
use crate::tol;

/// An `n x k` complex matrix with orthonormal columns, standing for the
/// `k`-dimensional subspace they span. Rank-0 frames are allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    cols: CMatrix,
}

impl Frame {
    /// Wraps columns after checking `|F*F - I|_F <= 1e-10`.
    pub fn new(cols: CMatrix) -> Result<Self> {
        let k = cols.ncols();
        let deviation = (cols.adjoint() * &cols - CMatrix::identity(k, k)).norm();
        if deviation > tol::FRAME {
            return Err(Error::NotOrthonormal { deviation });
        }
        Ok(Self { cols })
    }

    pub(crate) fn from_orthonormal(cols: CMatrix) -> Self {
        debug_assert!((cols.adjoint() * &cols - CMatrix::identity(cols.ncols(), cols.ncols())).norm() < 1e-8);
        Self { cols }
    }

    /// The zero subspace of `C^n`.
    pub fn empty(n: usize) -> Self {
        Self {
            cols: CMatrix::zeros(n, 0),
        }
    }

    /// All of `C^n`.
    pub fn full(n: usize) -> Self {
        Self {
            cols: CMatrix::identity(n, n),
        }
    }

    /// Span of the standard basis vectors `e_i`, `i` in `indices` (0-based).
    pub fn standard(n: usize, indices: &[usize]) -> Self {
        let mut cols = CMatrix::zeros(n, indices.len());
        for (c, &i) in indices.iter().enumerate() {
            cols[(i, c)] = Complex64::new(1.0, 0.0);
        }
        Self::new(cols).expect("standard basis vectors must be distinct")
    }

    /// Orthonormalizes and wraps arbitrary columns of full rank.
    pub fn span(vectors: &CMatrix) -> Result<Self> {
        orthonormalize(vectors, 1e-9)
    }

    pub fn ambient_dim(&self) -> usize {
        self.cols.nrows()
    }

    pub fn rank(&self) -> usize {
        self.cols.ncols()
    }

    pub fn columns(&self) -> &CMatrix {
        &self.cols
    }

    pub fn into_columns(self) -> CMatrix {
        self.cols
    }

    pub fn column(&self, i: usize) -> CMatrix {
        self.cols.columns(i, 1).into_owned()
    }

    /// Frame made of a subset of this frame's columns.
    pub fn select(&self, indices: &[usize]) -> Frame {
        let n = self.ambient_dim();
        let cols = CMatrix::from_fn(n, indices.len(), |r, c| self.cols[(r, indices[c])]);
        Frame { cols }
    }

    /// Direct sum with a subspace assumed orthogonal to this one; the result
    /// is re-orthonormalized.
    pub fn direct_sum(&self, other: &Frame) -> Result<Frame> {
        let n = check_same_ambient(self, other)?;
        let mut cols = CMatrix::zeros(n, self.rank() + other.rank());
        cols.columns_mut(0, self.rank()).copy_from(&self.cols);
        cols.columns_mut(self.rank(), other.rank()).copy_from(&other.cols);
        orthonormalize(&cols, 1e-9)
    }

    /// `(I - P_F) v`.
    pub fn reject(&self, v: &CMatrix) -> CMatrix {
        v - &self.cols * (self.cols.adjoint() * v)
    }

    /// Image of every column under `m`, without re-orthonormalizing.
    pub fn mapped(&self, m: &CMatrix) -> CMatrix {
        m * &self.cols
    }
}

impl Serialize for Frame {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FrameJson {
            ambient_dim: self.ambient_dim(),
            rank: self.rank(),
            columns: json::matrix_columns(&self.cols),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Frame {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = FrameJson::deserialize(d)?;
        if raw.columns.len() != raw.rank {
            return Err(D::Error::custom(format!(
                "frame rank {} but {} columns",
                raw.rank,
                raw.columns.len()
            )));
        }
        let cols = json::matrix_from_columns(&raw.columns, raw.ambient_dim).map_err(D::Error::custom)?;
        Frame::new(cols).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct FrameJson {
    ambient_dim: usize,
    rank: usize,
    columns: json::ComplexRows,
}

/// Principal angles in `[0, pi/2]`, ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalAngleProfile {
    pub angles: Vec<f64>,
}

impl PrincipalAngleProfile {
    pub fn zero_count(&self, angle_tol: f64) -> usize {
        self.angles.iter().filter(|&&a| a <= angle_tol).count()
    }
}

fn check_same_ambient(x: &Frame, y: &Frame) -> Result<usize> {
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: x.ambient_dim(),
            found: y.ambient_dim(),
        });
    }
    Ok(x.ambient_dim())
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Returns `None`
/// when some column has norm below `tol` after projection.
pub(crate) fn gram_schmidt(m: &CMatrix, tol: f64) -> Option<CMatrix> {
    let (n, k) = m.shape();
    let mut q = m.clone();
    for j in 0..k {
        let scale = q.column(j).norm().max(1.0);
        for _pass in 0..2 {
            for i in 0..j {
                let qi = q.column(i).into_owned();
                let dot = qi.dotc(&q.column(j));
                let mut col = q.column_mut(j);
                col -= qi * dot;
            }
        }
        let norm = q.column(j).norm();
        if norm < tol * scale {
            return None;
        }
        for r in 0..n {
            q[(r, j)] /= norm;
        }
    }
    Some(q)
}

pub(crate) fn sorted_singular(m: &CMatrix) -> (Vec<f64>, CMatrix, CMatrix) {
    let (rows, cols) = m.shape();
    let p = rows.min(cols);
    if p == 0 {
        return (Vec::new(), CMatrix::zeros(rows, 0), CMatrix::zeros(cols, 0));
    }
    let s = crate::svd::svd(m);
    let values = s.values.iter().rev().copied().collect();
    let u = CMatrix::from_fn(rows, p, |r, c| s.u[(r, p - 1 - c)]);
    let v = CMatrix::from_fn(cols, p, |r, c| s.v[(r, p - 1 - c)]);
    (values, u, v)
}

/// Sines of the principal angles between `a` and `b` (ascending) with left
/// and right singular vectors of `(I - P_a) b`. Requires `rank a >= rank b`.
struct SineDecomposition {
    sines: Vec<f64>,
    left: CMatrix,
    right: CMatrix,
}

fn sine_decomposition(a: &Frame, b: &Frame) -> SineDecomposition {
    let r = a.reject(&b.cols);
    let (sines, left, right) = sorted_singular(&r);
    SineDecomposition { sines, left, right }
}

fn larger_first<'a>(x: &'a Frame, y: &'a Frame) -> (&'a Frame, &'a Frame) {
    if x.rank() >= y.rank() {
        (x, y)
    } else {
        (y, x)
    }
}

/// Orthonormal frame for the column space of `vectors`.
pub fn orthonormalize(vectors: &CMatrix, tol: f64) -> Result<Frame> {
    let k = vectors.ncols();
    if k == 0 {
        return Ok(Frame::empty(vectors.nrows()));
    }
    let (sv, _, _) = sorted_singular(vectors);
    let rank = sv.iter().filter(|&&s| s > tol).count();
    if rank < k {
        return Err(Error::RankDeficient { rank, expected: k });
    }
    let q = gram_schmidt(vectors, 1e-12).ok_or(Error::RankDeficient {
        rank: k - 1,
        expected: k,
    })?;
    Ok(Frame { cols: q })
}

/// `P = F F*`.
pub fn projection_of(x: &Frame) -> HermitianOperator {
    HermitianOperator::symmetrized(&x.cols * x.cols.adjoint())
}

/// Frame of the image of a projection.
pub fn image_of_projection(p: &HermitianOperator, tol: f64) -> Result<Frame> {
    let (ok, rank) = is_projection(p, tol);
    if !ok {
        return Err(Error::NotAProjection {
            residual: crate::hermitian::idempotency_residual(p),
        });
    }
    let rank = rank.unwrap_or(0);
    let spec = spectral_decompose(p);
    let cols = spec.eigenvectors.columns(0, rank).into_owned();
    let q = gram_schmidt(&cols, 1e-6).ok_or(Error::RankDeficient {
        rank: 0,
        expected: rank,
    })?;
    Ok(Frame { cols: q })
}

/// `X ∩ Y`, spanned by principal vectors with angle at most `angle_tol`.
pub fn meet(x: &Frame, y: &Frame, angle_tol: f64) -> Result<Frame> {
    let n = check_same_ambient(x, y)?;
    let (a, b) = larger_first(x, y);
    if b.rank() == 0 {
        return Ok(Frame::empty(n));
    }
    let dec = sine_decomposition(a, b);
    let cutoff = angle_tol.sin();
    let picked: Vec<usize> = (0..dec.sines.len()).filter(|&i| dec.sines[i] <= cutoff).collect();
    let sel = CMatrix::from_fn(b.rank(), picked.len(), |r, c| dec.right[(r, picked[c])]);
    let cols = &b.cols * sel;
    let q = gram_schmidt(&cols, 1e-6).unwrap_or_else(|| CMatrix::zeros(n, 0));
    Ok(Frame { cols: q })
}

/// Intersection of several subspaces of a common ambient space.
pub fn meet_all<'a, I>(frames: I, angle_tol: f64) -> Result<Frame>
where
    I: IntoIterator<Item = &'a Frame>,
{
    let mut it = frames.into_iter();
    let mut acc = it.next().expect("meet_all needs at least one frame").clone();
    for f in it {
        acc = meet(&acc, f, angle_tol)?;
    }
    Ok(acc)
}

/// `X + Y`.
pub fn join(x: &Frame, y: &Frame) -> Result<Frame> {
    let n = check_same_ambient(x, y)?;
    let (a, b) = larger_first(x, y);
    if b.rank() == 0 {
        return Ok(a.clone());
    }
    let dec = sine_decomposition(a, b);
    let cutoff = tol::ANGLE.sin();
    let picked: Vec<usize> = (0..dec.sines.len()).filter(|&i| dec.sines[i] > cutoff).collect();
    let mut cols = CMatrix::zeros(n, a.rank() + picked.len());
    cols.columns_mut(0, a.rank()).copy_from(&a.cols);
    for (c, &i) in picked.iter().enumerate() {
        cols.column_mut(a.rank() + c).copy_from(&dec.left.column(i));
    }
    let q = gram_schmidt(&cols, 1e-6).expect("join columns are orthonormal by construction");
    Ok(Frame { cols: q })
}

/// `X^⊥` in the ambient space.
pub fn ortho_complement(x: &Frame) -> Frame {
    let n = x.ambient_dim();
    let k = x.rank();
    let comp = &HermitianOperator::identity(n) - &projection_of(x);
    let spec = spectral_decompose(&comp);
    let cols = spec.eigenvectors.columns(0, n - k).into_owned();
    let q = gram_schmidt(&cols, 1e-6).expect("eigenvectors are orthonormal");
    Frame { cols: q }
}

/// Principal angles, computed from cosines for large angles and from sines
/// for small ones so that both ends are accurate.
pub fn principal_angles(x: &Frame, y: &Frame) -> Result<PrincipalAngleProfile> {
    check_same_ambient(x, y)?;
    let (a, b) = larger_first(x, y);
    if b.rank() == 0 {
        return Ok(PrincipalAngleProfile { angles: Vec::new() });
    }
    let (mut cosines, _, _) = sorted_singular(&(a.cols.adjoint() * &b.cols));
    cosines.reverse();
    let sines = sine_decomposition(a, b).sines;
    let angles = cosines
        .iter()
        .zip(&sines)
        .map(|(&c, &s)| {
            if c < std::f64::consts::FRAC_1_SQRT_2 {
                c.clamp(0.0, 1.0).acos()
            } else {
                s.clamp(0.0, 1.0).asin()
            }
        })
        .collect();
    Ok(PrincipalAngleProfile { angles })
}

/// `|[P_X, P_Y]|_F`.
pub fn commutator_norm(x: &Frame, y: &Frame) -> Result<f64> {
    check_same_ambient(x, y)?;
    let px = projection_of(x);
    let py = projection_of(y);
    Ok((px.product(&py) - py.product(&px)).norm())
}

/// Compatibility as commutation of the two projections.
pub fn is_compatible(x: &Frame, y: &Frame, tol: f64) -> Result<bool> {
    Ok(commutator_norm(x, y)? <= tol)
}

/// `|P_X - P_Y|_F` for subspaces of equal dimension.
pub fn gap_distance(x: &Frame, y: &Frame) -> Result<f64> {
    check_same_ambient(x, y)?;
    if x.rank() != y.rank() {
        return Err(Error::RankMismatch {
            left: x.rank(),
            right: y.rank(),
        });
    }
    Ok((projection_of(x).matrix() - projection_of(y).matrix()).norm())
}

/// `outer ∩ inner^⊥` for `inner ⊆ outer`: the directions of `outer` left
/// after removing `inner`.
pub fn relative_complement(outer: &Frame, inner: &Frame) -> Result<Frame> {
    check_same_ambient(outer, inner)?;
    let want = outer.rank().saturating_sub(inner.rank());
    let (_, left, _) = sorted_singular(&inner.reject(&outer.cols));
    let p = left.ncols();
    let cols = CMatrix::from_fn(outer.ambient_dim(), want, |r, c| left[(r, p - 1 - c)]);
    let q = gram_schmidt(&cols, 1e-6).ok_or(Error::RankDeficient {
        rank: 0,
        expected: want,
    })?;
    Ok(Frame { cols: q })
}

/// `|(I - P_outer) F_inner|_F`: zero iff `inner ⊆ outer`.
pub fn containment_residual(outer: &Frame, inner: &Frame) -> Result<f64> {
    check_same_ambient(outer, inner)?;
    Ok(outer.reject(&inner.cols).norm())
}

pub fn is_orthogonal(x: &Frame, y: &Frame, tol: f64) -> Result<bool> {
    check_same_ambient(x, y)?;
    Ok((x.cols.adjoint() * &y.cols).norm() <= tol)
}
