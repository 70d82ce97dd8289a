//! The set `X_k(X, Y)` of rank-`k` subspaces `Z` for which
//! `P_X + P_Y - P_Z` is again a rank-`k` projection.
//!
//! Every member satisfies `X ∩ Y ⊆ Z ⊆ X + Y`, so all computations run in
//! reduced coordinates: with `C = X ∩ Y`, `d = k - dim C` and `E` an
//! orthonormal basis of `(X + Y) ∩ C^⊥` (dimension `2d`), a candidate is
//! `Z = C ⊕ E Q` for a `2d x d` orthonormal `Q`, and the constraint becomes
//! `(T - Q Q*)^2 = T - Q Q*` with `T = E* (P_X + P_Y) E`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph;
use crate::hermitian::{is_projection, real_coords, CMatrix, HermitianBasis, HermitianOperator};
use crate::random;
use crate::subspace::{
    gram_schmidt, image_of_projection, is_compatible, join, meet, ortho_complement, projection_of, relative_complement,
    Frame,
};
use crate::svd::{real_singular_values, real_solve};
use crate::tol;

/// Singular values of the constraint Jacobian above this count toward its rank.
pub const JACOBIAN_THRESHOLD: f64 = tol::JACOBIAN_RANK;
/// Restarts of the local search per requested point.
pub const RESTARTS: usize = 50;
/// Members drawn from the interval when confirming the compatible case.
pub const INTERVAL_CHECKS: usize = 50;

const RESIDUAL_TARGET: f64 = 1e-13;
const MAX_ITERATIONS: usize = 200;
const PCA_STEP: f64 = 1e-4;

fn check_pair(x: &Frame, y: &Frame) -> Result<()> {
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: x.ambient_dim(),
            found: y.ambient_dim(),
        });
    }
    if x.rank() != y.rank() {
        return Err(Error::RankMismatch {
            left: x.rank(),
            right: y.rank(),
        });
    }
    Ok(())
}

/// `P_X + P_Y - P_Z` is a rank-`k` projection.
pub fn xset_contains(x: &Frame, y: &Frame, z: &Frame, tol: f64) -> Result<bool> {
    check_pair(x, y)?;
    check_pair(x, z)?;
    let s = &(&projection_of(x) + &projection_of(y)) - &projection_of(z);
    Ok(is_projection(&s, tol) == (true, Some(x.rank())))
}

/// The partner `Z'` with `P_X + P_Y = P_Z + P_Z'`.
pub fn complementary_member(x: &Frame, y: &Frame, z: &Frame, tol: f64) -> Result<Frame> {
    if !xset_contains(x, y, z, tol)? {
        return Err(Error::NotAMember {
            residual: membership_residual(x, y, z)?,
        });
    }
    let s = &(&projection_of(x) + &projection_of(y)) - &projection_of(z);
    image_of_projection(&s, tol.max(tol::RANK))
}

/// `|S^2 - S|_F` for `S = P_X + P_Y - P_Z`.
pub fn membership_residual(x: &Frame, y: &Frame, z: &Frame) -> Result<f64> {
    check_pair(x, y)?;
    check_pair(x, z)?;
    let s = &(&projection_of(x) + &projection_of(y)) - &projection_of(z);
    Ok(crate::hermitian::idempotency_residual(&s))
}

/// Reduced coordinates for one pair.
#[derive(Clone, Debug)]
pub struct Reduction {
    meet: Frame,
    basis: CMatrix,
    target: CMatrix,
    d: usize,
}

impl Reduction {
    pub fn new(x: &Frame, y: &Frame) -> Result<Self> {
        check_pair(x, y)?;
        let c = meet(x, y, tol::ANGLE)?;
        let j = join(x, y)?;
        let e = relative_complement(&j, &c)?;
        let d = x.rank() - c.rank();
        if e.rank() != 2 * d {
            return Err(Error::RankDeficient {
                rank: e.rank(),
                expected: 2 * d,
            });
        }
        let e = e.into_columns();
        let s = projection_of(x).matrix() + projection_of(y).matrix();
        let target = e.adjoint() * s * &e;
        Ok(Self {
            meet: c,
            basis: e,
            target,
            d,
        })
    }

    /// `k - dim(X ∩ Y)`.
    pub fn d(&self) -> usize {
        self.d
    }

    /// Real dimension `2 d^2` of the reduced Grassmannian.
    pub fn chart_dim(&self) -> usize {
        2 * self.d * self.d
    }

    pub fn frame_of(&self, q: &CMatrix) -> Frame {
        let z0 = Frame::from_orthonormal(&self.basis * q);
        self.meet
            .direct_sum(&z0)
            .expect("reduced block is orthogonal to the meet")
    }

    /// Reduced block of a member; `None` if `z` is not inside the interval.
    pub fn chart_of(&self, z: &Frame) -> Option<CMatrix> {
        let z0 = relative_complement(z, &self.meet).ok()?;
        let q = self.basis.adjoint() * z0.columns();
        let defect = (&self.basis * &q - z0.columns()).norm();
        if defect > 1e-6 {
            return None;
        }
        gram_schmidt(&q, 1e-6)
    }

    fn residual(&self, q: &CMatrix) -> CMatrix {
        let m = &self.target - q * q.adjoint();
        &m * &m - m
    }

    fn residual_coords(&self, q: &CMatrix) -> DVector<f64> {
        hermitian_coords(&self.residual(q), 2 * self.d)
    }

    /// Orthonormal complement of `Q` inside `C^{2d}`.
    fn complement(&self, q: &CMatrix) -> CMatrix {
        ortho_complement(&Frame::from_orthonormal(q.clone())).into_columns()
    }

    /// Jacobian of the residual in the chart `Δ -> orth(Q + Q_⊥ Δ)` at `Δ = 0`.
    fn jacobian(&self, q: &CMatrix, qc: &CMatrix) -> DMatrix<f64> {
        let d = self.d;
        let m = &self.target - q * q.adjoint();
        let mut jac = DMatrix::zeros(4 * d * d, 2 * d * d);
        let mut col = 0;
        for r in 0..d {
            for c in 0..d {
                for unit in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                    let dq = qc.column(r) * q.column(c).adjoint() * unit;
                    let dp = &dq + dq.adjoint();
                    let dr = &dp - &dp * &m - &m * &dp;
                    jac.column_mut(col).copy_from(&hermitian_coords(&dr, 2 * d));
                    col += 1;
                }
            }
        }
        jac
    }

    /// Moves along the chart by real coordinates `delta`.
    fn retract(&self, q: &CMatrix, qc: &CMatrix, delta: &DVector<f64>) -> CMatrix {
        let d = self.d;
        let step = CMatrix::from_fn(d, d, |r, c| {
            let i = 2 * (r * d + c);
            Complex64::new(delta[i], delta[i + 1])
        });
        let moved = q + qc * step;
        gram_schmidt(&moved, 1e-12).unwrap_or_else(|| q.clone())
    }

    /// Chart coordinates of `p` seen from `q`; requires `Q* P` invertible.
    fn coordinates(&self, q: &CMatrix, qc: &CMatrix, p: &CMatrix) -> Option<DVector<f64>> {
        let inv = (q.adjoint() * p).try_inverse()?;
        let delta = qc.adjoint() * p * inv;
        let d = self.d;
        let mut out = DVector::zeros(2 * d * d);
        for r in 0..d {
            for c in 0..d {
                out[2 * (r * d + c)] = delta[(r, c)].re;
                out[2 * (r * d + c) + 1] = delta[(r, c)].im;
            }
        }
        Some(out)
    }

    /// Gauss-Newton with minimum-norm steps and backtracking. Returns the
    /// final block and its residual norm.
    pub fn project(&self, start: &CMatrix) -> (CMatrix, f64) {
        let mut q = start.clone();
        let mut res = self.residual_coords(&q).norm();
        for _ in 0..MAX_ITERATIONS {
            if res <= RESIDUAL_TARGET {
                break;
            }
            let qc = self.complement(&q);
            let jac = self.jacobian(&q, &qc);
            let r = self.residual_coords(&q);
            let step = real_solve(&jac, &(-r), 1e-10);
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let cand = self.retract(&q, &qc, &(&step * scale));
                let cand_res = self.residual_coords(&cand).norm();
                if cand_res < res {
                    q = cand;
                    res = cand_res;
                    accepted = true;
                    break;
                }
                scale *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        (q, res)
    }
}

fn hermitian_coords(m: &CMatrix, dim: usize) -> DVector<f64> {
    let h = HermitianOperator::symmetrized(m.clone());
    real_coords(&h, &HermitianBasis::new(dim)).expect("square of the reduced size")
}

/// Seeded members of `X_k(X, Y)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct XSetSample {
    #[serde(rename = "X")]
    pub x: Frame,
    #[serde(rename = "Y")]
    pub y: Frame,
    pub points: Vec<Frame>,
    pub seed: u64,
}

/// Up to `count` members found by local search from random starts inside
/// `[X ∩ Y, X + Y]_k`. Each point gets [`RESTARTS`] attempts from its own
/// substream; points that never converge are dropped.
pub fn xset_sample(x: &Frame, y: &Frame, count: usize, seed: u64, tol: f64) -> Result<XSetSample> {
    let red = Reduction::new(x, y)?;
    let points: Vec<Frame> = if red.d() == 0 {
        vec![x.clone(); count]
    } else {
        (0..count)
            .into_par_iter()
            .filter_map(|i| {
                let mut rng = random::substream(seed, i as u64);
                (0..RESTARTS).find_map(|_| {
                    let start = random::frame(&mut rng, 2 * red.d(), red.d()).into_columns();
                    let (q, _) = red.project(&start);
                    let z = red.frame_of(&q);
                    matches!(xset_contains(x, y, &z, tol), Ok(true)).then_some(z)
                })
            })
            .collect()
    };
    Ok(XSetSample {
        x: x.clone(),
        y: y.clone(),
        points,
        seed,
    })
}

/// Both estimates of the local dimension at a member.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalDimension {
    pub jacobian: usize,
    pub pca: usize,
}

/// Jacobian-nullity and local-PCA estimates at `at`, without requiring
/// agreement.
pub fn local_dimension_estimates(x: &Frame, y: &Frame, at: &Frame, tol: f64, seed: u64) -> Result<LocalDimension> {
    if !xset_contains(x, y, at, tol)? {
        return Err(Error::NotAMember {
            residual: membership_residual(x, y, at)?,
        });
    }
    let red = Reduction::new(x, y)?;
    if red.d() == 0 {
        return Ok(LocalDimension { jacobian: 0, pca: 0 });
    }
    let q = red.chart_of(at).ok_or(Error::NotAMember {
        residual: membership_residual(x, y, at)?,
    })?;
    let qc = red.complement(&q);
    let dim = red.chart_dim();

    let jac = red.jacobian(&q, &qc);
    let rank = real_singular_values(&jac)
        .iter()
        .filter(|&&s| s > JACOBIAN_THRESHOLD)
        .count();
    let jacobian = dim - rank;

    let samples = 3 * dim + 10;
    let mut rng = random::rng(seed);
    let mut cloud = DMatrix::zeros(dim, samples);
    for s in 0..samples {
        let mut dir = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
        dir *= PCA_STEP / dir.norm().max(1e-300);
        let start = red.retract(&q, &qc, &dir);
        let (p, _) = red.project(&start);
        if let Some(c) = red.coordinates(&q, &qc, &p) {
            cloud.column_mut(s).copy_from(&c);
        }
    }
    // A tangent direction contributes about eps * sqrt(samples / dim);
    // curvature and solver error stay near eps^2.
    let floor = 0.05 * PCA_STEP * (samples as f64 / dim as f64).sqrt();
    let pca = real_singular_values(&cloud).iter().filter(|&&s| s > floor).count();
    Ok(LocalDimension { jacobian, pca })
}

/// Real dimension of `X_k(X, Y)` near `at`. Fails with
/// `EstimatorDisagreement` when the two estimators differ.
pub fn xset_local_dimension(x: &Frame, y: &Frame, at: &Frame, tol: f64) -> Result<usize> {
    local_dimension_seeded(x, y, at, tol, 0)
}

pub fn local_dimension_seeded(x: &Frame, y: &Frame, at: &Frame, tol: f64, seed: u64) -> Result<usize> {
    let est = local_dimension_estimates(x, y, at, tol, seed)?;
    if est.jacobian != est.pca {
        return Err(Error::EstimatorDisagreement {
            jacobian: est.jacobian,
            pca: est.pca,
        });
    }
    Ok(est.jacobian)
}

/// A uniformly random point of `[X ∩ Y, X + Y]_k`.
pub fn random_interval_member<R: Rng + ?Sized>(red: &Reduction, rng: &mut R) -> Frame {
    let d = red.d();
    red.frame_of(&random::frame(rng, 2 * d, d).into_columns())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeherTag {
    CompatibleFullInterval,
    NonCompatibleAdjacentCurve,
    Other,
}

/// Compatible pairs have the whole interval as `X_k`; noncompatible
/// adjacent pairs have a curve. Both cases are cross-checked numerically
/// and a failed check is reported as `CrossValidationFailed`.
pub fn geher_classify(x: &Frame, y: &Frame, tol: f64) -> Result<GeherTag> {
    geher_classify_seeded(x, y, tol, 0)
}

pub fn geher_classify_seeded(x: &Frame, y: &Frame, tol: f64, seed: u64) -> Result<GeherTag> {
    check_pair(x, y)?;
    if is_compatible(x, y, tol::COMPATIBLE)? {
        let red = Reduction::new(x, y)?;
        let mut rng = random::rng(seed);
        for i in 0..INTERVAL_CHECKS {
            let z = random_interval_member(&red, &mut rng);
            if !xset_contains(x, y, &z, tol)? {
                return Err(Error::CrossValidationFailed(format!(
                    "interval member {i} of a compatible pair is not in X_k"
                )));
            }
        }
        return Ok(GeherTag::CompatibleFullInterval);
    }
    if graph::is_adjacent(x, y)? {
        let dim = local_dimension_seeded(x, y, x, tol, seed)?;
        if dim != 1 {
            return Err(Error::CrossValidationFailed(format!(
                "noncompatible adjacent pair has local dimension {dim}, expected 1"
            )));
        }
        return Ok(GeherTag::NonCompatibleAdjacentCurve);
    }
    Ok(GeherTag::Other)
}

/// Fraction of `count` random interval members that lie in `X_k`.
pub fn interval_membership_rate(x: &Frame, y: &Frame, count: usize, seed: u64, tol: f64) -> Result<usize> {
    let red = Reduction::new(x, y)?;
    let mut rng = random::rng(seed);
    let mut hits = 0;
    for _ in 0..count {
        if xset_contains(x, y, &random_interval_member(&red, &mut rng), tol)? {
            hits += 1;
        }
    }
    Ok(hits)
}
