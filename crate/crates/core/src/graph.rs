//! The Grassmann graph `Γ_k`: vertices are `k`-dimensional subspaces, edges
//! join subspaces meeting in dimension `k - 1`.
//!
//! Distances are read from the dimension of the intersection,
//! `d_k(X, Y) = k - dim(X ∩ Y)`. Geodesics are built from principal vector
//! pairs: with `C = X ∩ Y` and biorthogonal pairs `(x_i, y_i)` completing `C`
//! to `X` and `Y`, the `j`-th vertex is `C + span(y_1..y_j) + span(x_{j+1}..)`.
//! Those vectors are orthonormal, so every vertex is a genuine `k`-frame.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::CMatrix;
use crate::random;
use crate::subspace::{
    commutator_norm, containment_residual, gap_distance, is_compatible, join, meet, ortho_complement,
    relative_complement, sorted_singular, Frame,
};
use crate::tol;

fn check_ranks(x: &Frame, y: &Frame) -> Result<usize> {
    if x.rank() != y.rank() {
        return Err(Error::RankMismatch {
            left: x.rank(),
            right: y.rank(),
        });
    }
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: x.ambient_dim(),
            found: y.ambient_dim(),
        });
    }
    Ok(x.rank())
}

pub fn distance(x: &Frame, y: &Frame) -> Result<usize> {
    let k = check_ranks(x, y)?;
    Ok(k - meet(x, y, tol::ANGLE)?.rank())
}

pub fn is_adjacent(x: &Frame, y: &Frame) -> Result<bool> {
    Ok(distance(x, y)? == 1)
}

/// Adjacent and compatible.
pub fn is_ortho_adjacent(x: &Frame, y: &Frame) -> Result<bool> {
    Ok(is_adjacent(x, y)? && is_compatible(x, y, tol::COMPATIBLE)?)
}

/// An ordered list of `k`-frames, consecutive ones adjacent.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GeodesicPath {
    pub vertices: Vec<Frame>,
}

impl GeodesicPath {
    pub fn edge_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }

    pub fn first(&self) -> &Frame {
        &self.vertices[0]
    }

    pub fn last(&self) -> &Frame {
        self.vertices.last().expect("paths are nonempty")
    }

    fn verify_steps(&self) -> Result<()> {
        for w in self.vertices.windows(2) {
            if !is_adjacent(&w[0], &w[1])? {
                return Err(Error::PreconditionViolated(
                    "consecutive geodesic vertices are not adjacent".into(),
                ));
            }
        }
        Ok(())
    }
}

fn columns_of(parts: &[&CMatrix], n: usize) -> CMatrix {
    let total = parts.iter().map(|p| p.ncols()).sum();
    let mut m = CMatrix::zeros(n, total);
    let mut at = 0;
    for p in parts {
        m.columns_mut(at, p.ncols()).copy_from(*p);
        at += p.ncols();
    }
    m
}

/// Principal pairs of two equal-rank frames meeting trivially: columns
/// `x_i`, `y_i` with `x_i* y_j = cos(theta_i) δ_ij`, ascending angle.
fn principal_pairs(x: &Frame, y: &Frame) -> (CMatrix, CMatrix) {
    let m = x.columns().adjoint() * y.columns();
    let (_, u, v) = sorted_singular(&m);
    // sorted_singular is ascending in the cosine; reverse for ascending angle.
    let d = u.ncols();
    let u = CMatrix::from_fn(u.nrows(), d, |r, c| u[(r, d - 1 - c)]);
    let v = CMatrix::from_fn(v.nrows(), d, |r, c| v[(r, d - 1 - c)]);
    (x.columns() * u, y.columns() * v)
}

/// Geodesic from `x` to `y` exchanging one principal vector per step.
pub fn build_geodesic(x: &Frame, y: &Frame) -> Result<GeodesicPath> {
    check_ranks(x, y)?;
    let n = x.ambient_dim();
    let common = meet(x, y, tol::ANGLE)?;
    let xr = relative_complement(x, &common)?;
    let yr = relative_complement(y, &common)?;
    let d = xr.rank();
    let mut vertices = vec![x.clone()];
    if d > 0 {
        let (px, py) = principal_pairs(&xr, &yr);
        for j in 1..d {
            let ys = py.columns(0, j).into_owned();
            let xs = px.columns(j, d - j).into_owned();
            let cols = columns_of(&[common.columns(), &ys, &xs], n);
            vertices.push(Frame::span(&cols)?);
        }
        vertices.push(y.clone());
    }
    let path = GeodesicPath { vertices };
    path.verify_steps()?;
    Ok(path)
}

/// For compatible `x`, `y` with `n >= 2k`: a geodesic of length `k` that
/// starts at `x`, passes through `y`, and ends at a subspace orthogonal to `x`.
///
/// With `C = X ∩ Y`, `X = X' + C` and `Y = Y' + C` where `X' ⊥ Y'`, the far
/// endpoint is `Y' + D` for a `dim C`-dimensional `D ⊥ X + Y`. Every vertex is
/// spanned by a subset of one orthonormal family, so the vertices are
/// mutually compatible.
pub fn geodesic_through_to_orthogonal(x: &Frame, y: &Frame) -> Result<GeodesicPath> {
    let k = check_ranks(x, y)?;
    let n = x.ambient_dim();
    if n < 2 * k {
        return Err(Error::InsufficientAmbientDim {
            ambient: n,
            required: 2 * k,
        });
    }
    let commutator = commutator_norm(x, y)?;
    if commutator > tol::COMPATIBLE {
        return Err(Error::NotCompatible { commutator });
    }
    let common = meet(x, y, tol::ANGLE)?;
    let c = common.rank();
    let yr = relative_complement(y, &common)?;
    let outside = ortho_complement(&join(x, y)?);
    let fresh = outside.select(&(0..c).collect::<Vec<_>>());

    let mut path = build_geodesic(x, y)?;
    for j in 1..=c {
        let moved = fresh.columns().columns(0, j).into_owned();
        let kept = common.columns().columns(j, c - j).into_owned();
        let cols = columns_of(&[yr.columns(), &moved, &kept], n);
        path.vertices.push(Frame::span(&cols)?);
    }
    path.verify_steps()?;
    Ok(path)
}

/// The star `[X⟩_k`: all `k`-subspaces containing a fixed `(k-1)`-subspace.
#[derive(Clone, Debug)]
pub struct Star {
    base: Frame,
}

impl Star {
    pub fn new(base: Frame) -> Result<Self> {
        if base.rank() == 0 || base.rank() >= base.ambient_dim() {
            return Err(Error::BadRank {
                rank: base.rank() + 1,
                dim: base.ambient_dim(),
            });
        }
        Ok(Self { base })
    }

    pub fn base(&self) -> &Frame {
        &self.base
    }

    /// Rank of the members.
    pub fn k(&self) -> usize {
        self.base.rank() + 1
    }

    pub fn contains(&self, z: &Frame) -> Result<bool> {
        Ok(z.rank() == self.k() && containment_residual(z, &self.base)? <= tol::SAME_SUBSPACE)
    }
}

/// The top `⟨Y]_k`: all `k`-subspaces inside a fixed `(k+1)`-subspace.
#[derive(Clone, Debug)]
pub struct Top {
    roof: Frame,
}

impl Top {
    pub fn new(roof: Frame) -> Result<Self> {
        if roof.rank() < 2 {
            return Err(Error::BadRank {
                rank: roof.rank().saturating_sub(1),
                dim: roof.ambient_dim(),
            });
        }
        Ok(Self { roof })
    }

    pub fn roof(&self) -> &Frame {
        &self.roof
    }

    pub fn k(&self) -> usize {
        self.roof.rank() - 1
    }

    pub fn contains(&self, z: &Frame) -> Result<bool> {
        Ok(z.rank() == self.k() && containment_residual(&self.roof, z)? <= tol::SAME_SUBSPACE)
    }
}

/// The `k + 1` hyperplanes of the roof spanned by all but one of its basis
/// vectors.
pub fn max_compatible_in_top(top: &Top) -> Vec<Frame> {
    let r = top.roof.rank();
    (0..r)
        .map(|skip| {
            let keep: Vec<usize> = (0..r).filter(|&i| i != skip).collect();
            top.roof.select(&keep)
        })
        .collect()
}

/// `base + span(v_i)` over an orthonormal basis `v_i` of `ambient ∩ base^⊥`.
pub fn max_compatible_in_star(star: &Star, ambient: &Frame) -> Result<Vec<Frame>> {
    if containment_residual(ambient, &star.base)? > tol::SAME_SUBSPACE {
        return Err(Error::PreconditionViolated(
            "star base is not inside the ambient subspace".into(),
        ));
    }
    let rest = relative_complement(ambient, &star.base)?;
    (0..rest.rank())
        .map(|i| star.base.direct_sum(&rest.select(&[i])))
        .collect()
}

/// Outcome of probing a compatible family for extensions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalityProbe {
    pub candidates: usize,
    /// Candidates compatible with every family member.
    pub compatible_with_all: usize,
    /// Such candidates that differ from every member: each one refutes maximality.
    pub extensions: usize,
}

fn tally(probe: &mut MaximalityProbe, z: &Frame, family: &[Frame]) -> Result<()> {
    probe.candidates += 1;
    let mut all = true;
    for f in family {
        if !is_compatible(z, f, tol::COMPATIBLE)? {
            all = false;
            break;
        }
    }
    if all {
        probe.compatible_with_all += 1;
        let mut equal = false;
        for f in family {
            if gap_distance(z, f)? <= tol::SAME_SUBSPACE {
                equal = true;
                break;
            }
        }
        if !equal {
            probe.extensions += 1;
        }
    }
    Ok(())
}

/// Rotates columns `a`, `b` of `m` by angle `t` in their plane.
fn plane_rotation(m: &CMatrix, a: usize, b: usize, t: f64) -> CMatrix {
    let mut out = m.clone();
    let (c, s) = (t.cos(), t.sin());
    for r in 0..m.nrows() {
        out[(r, a)] = m[(r, a)] * c + m[(r, b)] * s;
        out[(r, b)] = m[(r, b)] * c - m[(r, a)] * s;
    }
    out
}

/// Draws candidates inside the top and counts extensions of `family`.
///
/// Candidates cycle through three kinds: Haar-random members of the top,
/// family members written in a scrambled basis (compatible with everything,
/// must coincide with a member), and hyperplanes of a roof basis rotated in
/// one plane (compatible with some members only).
pub fn probe_top_maximality(top: &Top, family: &[Frame], candidates: usize, seed: u64) -> Result<MaximalityProbe> {
    let mut rng = random::rng(seed);
    let mut probe = MaximalityProbe::default();
    let r = top.roof.rank();
    let k = top.k();
    for i in 0..candidates {
        let z = match i % 3 {
            0 => Frame::span(&(top.roof.columns() * random::frame(&mut rng, r, k).columns()))?,
            1 => {
                let f = &family[i / 3 % family.len()];
                Frame::span(&(f.columns() * random::unitary(&mut rng, k)))?
            }
            _ => {
                let a = i % r;
                let b = (a + 1 + (i / 3) % (r - 1)) % r;
                let t = random::uniform(&mut rng, 0.1, 1.4);
                let rot = plane_rotation(top.roof.columns(), a, b, t);
                let skip = (i / 7) % r;
                let keep: Vec<usize> = (0..r).filter(|&j| j != skip).collect();
                let cols = CMatrix::from_fn(rot.nrows(), k, |row, c| rot[(row, keep[c])]);
                Frame::span(&cols)?
            }
        };
        tally(&mut probe, &z, family)?;
    }
    Ok(probe)
}

/// Star counterpart of [`probe_top_maximality`].
pub fn probe_star_maximality(
    star: &Star,
    ambient: &Frame,
    family: &[Frame],
    candidates: usize,
    seed: u64,
) -> Result<MaximalityProbe> {
    let mut rng = random::rng(seed);
    let mut probe = MaximalityProbe::default();
    let rest = relative_complement(ambient, &star.base)?;
    let e = rest.rank();
    for i in 0..candidates {
        let z = match i % 3 {
            0 => {
                let line = rest.columns() * random::unit_vector(&mut rng, e);
                star.base.direct_sum(&Frame::span(&line)?)?
            }
            1 => {
                let f = &family[i / 3 % family.len()];
                Frame::span(&(f.columns() * random::unitary(&mut rng, star.k())))?
            }
            _ if e >= 2 => {
                let a = i % e;
                let b = (a + 1 + (i / 3) % (e - 1)) % e;
                let t = random::uniform(&mut rng, 0.1, 1.4);
                let rot = plane_rotation(rest.columns(), a, b, t);
                star.base.direct_sum(&Frame::span(&rot.columns(a, 1).into_owned())?)?
            }
            _ => Frame::span(&(family[0].columns() * random::unitary(&mut rng, star.k())))?,
        };
        tally(&mut probe, &z, family)?;
    }
    Ok(probe)
}
