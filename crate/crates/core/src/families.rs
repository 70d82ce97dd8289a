//! Seeded generators for the pairs and operators used by the verification
//! suites, the examples and the tests.

use rand::Rng;

use crate::error::{Error, Result};
use crate::maps::{make_l_perp, make_l_u, make_l_uw, OperatorMap};
use crate::random;
use crate::semilinear::{SemilinearMap, Sigma};
use crate::subspace::{ortho_complement, Frame};

/// Columns `idx` of a Haar unitary, as a frame.
fn pick(u: &Frame, idx: std::ops::Range<usize>) -> Frame {
    u.select(&idx.collect::<Vec<_>>())
}

/// A random pair of `k`-subspaces of `C^n` meeting in exactly `c` dimensions.
pub fn pair_with_meet<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, c: usize) -> Result<(Frame, Frame)> {
    if c > k || 2 * k - c > n {
        return Err(Error::InsufficientAmbientDim {
            ambient: n,
            required: 2 * k - c.min(k),
        });
    }
    let common = random::frame(rng, n, c);
    let rest = ortho_complement(&common);
    let xs = Frame::span(&(rest.columns() * random::frame(rng, n - c, k - c).columns()))?;
    let ys = Frame::span(&(rest.columns() * random::frame(rng, n - c, k - c).columns()))?;
    Ok((common.direct_sum(&xs)?, common.direct_sum(&ys)?))
}

/// Compatible `k`-subspaces sharing `c` vectors of one random orthonormal basis.
pub fn compatible_pair<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, c: usize) -> Result<(Frame, Frame)> {
    if c > k || 2 * k - c > n {
        return Err(Error::InsufficientAmbientDim {
            ambient: n,
            required: 2 * k - c.min(k),
        });
    }
    let u = random::frame(rng, n, n);
    let x = pick(&u, 0..k);
    let mut idx: Vec<usize> = (0..c).collect();
    idx.extend(k..(2 * k - c));
    Ok((x, u.select(&idx)))
}

/// Orthogonal `k`-subspaces of `C^n`, `n >= 2k`.
pub fn orthogonal_pair<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Result<(Frame, Frame)> {
    compatible_pair(rng, n, k, 0)
}

/// Adjacent, noncompatible `k`-subspaces: a shared `(k-1)`-subspace plus
/// two lines at an angle in `[0.2, 1.3]` radians that are neither equal nor
/// orthogonal.
pub fn noncompatible_adjacent_pair<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Result<(Frame, Frame)> {
    if k == 0 || k + 1 > n {
        return Err(Error::InsufficientAmbientDim {
            ambient: n,
            required: k + 1,
        });
    }
    let u = random::frame(rng, n, k + 1);
    let common = pick(&u, 0..k - 1);
    let a = u.column(k - 1);
    let b = u.column(k);
    let t = random::uniform(rng, 0.2, 1.3);
    let phase = num_complex::Complex64::from_polar(1.0, random::uniform(rng, 0.0, std::f64::consts::TAU));
    let tilted = &a * num_complex::Complex64::new(t.cos(), 0.0) + &b * (phase * t.sin());
    Ok((
        common.direct_sum(&Frame::span(&a)?)?,
        common.direct_sum(&Frame::span(&tilted)?)?,
    ))
}

/// An `L_{U,W}` instance together with its generating data.
#[derive(Clone, Debug)]
pub struct PaddedInstance {
    pub map: OperatorMap,
    pub u: SemilinearMap,
    pub w: Frame,
    pub k: usize,
}

/// Random `U: C^n -> C^n'` and rank-`w_rank` `W ⊥ range(U)`.
pub fn padded_instance<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    n_prime: usize,
    k: usize,
    w_rank: usize,
    sigma: Sigma,
) -> Result<PaddedInstance> {
    if n + w_rank > n_prime {
        return Err(Error::InsufficientAmbientDim {
            ambient: n_prime,
            required: n + w_rank,
        });
    }
    let w = random::frame(rng, n_prime, w_rank);
    let u = SemilinearMap::isometry(random::isometry_into(rng, &ortho_complement(&w), n), sigma)?;
    Ok(PaddedInstance {
        map: make_l_uw(&u, &w, k)?,
        u,
        w,
        k,
    })
}

/// `L_U` for a random unitary of `C^n`.
pub fn unitary_instance<R: Rng + ?Sized>(rng: &mut R, n: usize, sigma: Sigma) -> Result<(OperatorMap, SemilinearMap)> {
    let u = SemilinearMap::isometry(random::unitary(rng, n), sigma)?;
    Ok((make_l_u(&u)?, u))
}

/// `L_k^⊥ ∘ L_U` for a random unitary of `C^n`.
pub fn orthocomplement_instance<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
    sigma: Sigma,
) -> Result<(OperatorMap, SemilinearMap)> {
    let (lu, u) = unitary_instance(rng, n, sigma)?;
    Ok((make_l_perp(k, n)?.compose(&lu)?.with_ranks(Some(k), Some(n - k)), u))
}
