//! Seeded sampling of Hermitian matrices, frames, and unitaries.
//!
//! Every randomized routine in the crate takes an explicit seed and draws
//! from [`rng`], so outputs are reproducible across runs and platforms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::hermitian::{CMatrix, HermitianOperator};
use crate::subspace::{gram_schmidt, Frame};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream from a base seed and a tag.
pub fn substream(seed: u64, tag: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(tag);
    r
}

/// Standard complex Gaussian entries, `E|z|^2 = 1`.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(s * re, s * im)
    })
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianOperator {
    HermitianOperator::symmetrized(gaussian(rng, n, n))
}

/// Haar-distributed point of `G_k(C^n)` via Gram-Schmidt of a Gaussian block.
pub fn frame<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Frame {
    loop {
        if let Some(q) = gram_schmidt(&gaussian(rng, n, k), 1e-6) {
            return Frame::from_orthonormal(q);
        }
    }
}

/// Haar-distributed unitary.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    frame(rng, n, n).into_columns()
}

/// Random isometry `C^n -> C^m` with range inside `within` (when given).
pub fn isometry_into<R: Rng + ?Sized>(rng: &mut R, within: &Frame, n: usize) -> CMatrix {
    let inner = frame(rng, within.rank(), n);
    within.columns() * inner.columns()
}

/// A Gaussian vector with unit norm.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let v = gaussian(rng, n, 1);
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

pub fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}
