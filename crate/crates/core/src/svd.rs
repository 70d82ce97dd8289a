//! One-sided Jacobi SVD for complex matrices.
//!
//! The bidiagonal SVD shipped with nalgebra can return inaccurate factors
//! for rank-deficient complex input, which breaks subspace intersections.
//! Jacobi orthogonalization of the columns is slower but keeps small
//! singular values to high relative accuracy.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::hermitian::CMatrix;

const MAX_SWEEPS: usize = 80;

/// `a = u diag(values) v*` with `values` descending, `u` of size `m x p`
/// and `v` of size `n x p`, `p = min(m, n)`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub values: Vec<f64>,
    pub u: CMatrix,
    pub v: CMatrix,
}

impl Svd {
    /// Least-squares solution of `a x = b`, ignoring singular values at or
    /// below `eps * max`.
    pub fn solve(&self, b: &CMatrix, eps: f64) -> CMatrix {
        let cut = eps * self.values.first().copied().unwrap_or(0.0);
        let mut ub = self.u.adjoint() * b;
        for (i, &s) in self.values.iter().enumerate() {
            let inv = if s > cut && s > 0.0 { 1.0 / s } else { 0.0 };
            for c in 0..ub.ncols() {
                ub[(i, c)] *= inv;
            }
        }
        &self.v * ub
    }
}

pub fn svd(a: &CMatrix) -> Svd {
    let (m, n) = a.shape();
    if m < n {
        let t = svd(&a.adjoint());
        return Svd {
            values: t.values,
            u: t.v,
            v: t.u,
        };
    }
    if n == 0 {
        return Svd {
            values: Vec::new(),
            u: CMatrix::zeros(m, 0),
            v: CMatrix::zeros(0, 0),
        };
    }

    let mut w = a.clone();
    let mut v = CMatrix::identity(n, n);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dotc(&w.column(q));
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, p, q, c, s, phase);
                rotate(&mut v, p, q, c, s, phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let cut = values[0] * (m as f64) * f64::EPSILON;

    let v = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    let mut u = CMatrix::zeros(m, n);
    let mut filled = Vec::new();
    for (c, &j) in order.iter().enumerate() {
        if norms[j] > cut && norms[j] > 0.0 {
            let col = w.column(j) / Complex64::new(norms[j], 0.0);
            u.column_mut(c).copy_from(&col);
            filled.push(c);
        }
    }
    complete_columns(&mut u, &filled);
    Svd { values, u, v }
}

/// `w_p <- c w_p - s phase* w_q`, `w_q <- s w_p + c phase* w_q`.
fn rotate(w: &mut CMatrix, p: usize, q: usize, c: f64, s: f64, phase: Complex64) {
    let shift = phase.conj();
    for r in 0..w.nrows() {
        let a = w[(r, p)];
        let b = w[(r, q)] * shift;
        w[(r, p)] = a * c - b * s;
        w[(r, q)] = a * s + b * c;
    }
}

/// Fills the columns of `u` not listed in `filled` with an orthonormal
/// completion of the filled ones.
fn complete_columns(u: &mut CMatrix, filled: &[usize]) {
    let (m, n) = u.shape();
    let mut basis: Vec<nalgebra::DVector<Complex64>> = filled.iter().map(|&c| u.column(c).into_owned()).collect();
    let mut candidate = 0;
    for c in 0..n {
        if filled.contains(&c) {
            continue;
        }
        loop {
            let mut e = nalgebra::DVector::<Complex64>::zeros(m);
            e[candidate % m] = Complex64::new(1.0, 0.0);
            candidate += 1;
            for _pass in 0..2 {
                for b in &basis {
                    let d = b.dotc(&e);
                    e -= b * d;
                }
            }
            let norm = e.norm();
            if norm > 1e-6 {
                e /= Complex64::new(norm, 0.0);
                u.column_mut(c).copy_from(&e);
                basis.push(e);
                break;
            }
            assert!(
                candidate < 4 * m + n,
                "orthonormal completion exhausted the standard basis"
            );
        }
    }
}

/// Singular values of a real matrix, descending.
pub fn real_singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    svd(&as_complex(a)).values
}

/// Least-squares solution of the real system `a x = b`.
pub fn real_solve(a: &DMatrix<f64>, b: &nalgebra::DVector<f64>, eps: f64) -> nalgebra::DVector<f64> {
    let rhs = CMatrix::from_fn(b.len(), 1, |r, _| Complex64::new(b[r], 0.0));
    let x = svd(&as_complex(a)).solve(&rhs, eps);
    nalgebra::DVector::from_fn(x.nrows(), |r, _| x[(r, 0)].re)
}

fn as_complex(a: &DMatrix<f64>) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn check(a: &CMatrix) {
        let s = svd(a);
        let p = a.nrows().min(a.ncols());
        assert_eq!(s.values.len(), p);
        assert!(s.values.windows(2).all(|w| w[0] >= w[1]));
        let sigma = CMatrix::from_fn(p, p, |r, c| {
            if r == c {
                Complex64::new(s.values[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let scale = a.norm().max(1.0);
        assert!((&s.u * sigma * s.v.adjoint() - a).norm() <= 1e-13 * scale);
        assert!((s.u.adjoint() * &s.u - CMatrix::identity(p, p)).norm() <= 1e-12);
        assert!((s.v.adjoint() * &s.v - CMatrix::identity(p, p)).norm() <= 1e-12);
    }

    #[test]
    fn factors_random_and_rank_deficient_matrices() {
        let mut rng = random::rng(5);
        for (m, n, r) in [(4, 4, 4), (6, 4, 2), (3, 5, 1), (6, 6, 0), (5, 2, 2), (1, 1, 1)] {
            for _ in 0..20 {
                let a = random::gaussian(&mut rng, m, r) * random::gaussian(&mut rng, r, n);
                check(&a);
                let s = svd(&a);
                assert!(s.values.iter().skip(r).all(|&x| x < 1e-12));
            }
        }
    }

    #[test]
    fn projected_frame_case() {
        // (I - P_C) X for C ⊂ X: singular values are exactly (1, 1, 0, 0).
        let mut rng = random::rng(9);
        let x = random::frame(&mut rng, 6, 4);
        let c = crate::subspace::Frame::from_orthonormal(x.columns().columns(0, 2).into_owned());
        let r = c.reject(x.columns());
        let s = svd(&r);
        assert!((s.values[0] - 1.0).abs() < 1e-14 && (s.values[1] - 1.0).abs() < 1e-14);
        assert!(s.values[2] < 1e-14);
        check(&r);
    }

    #[test]
    fn solve_least_squares() {
        let a = CMatrix::from_fn(3, 2, |r, c| Complex64::new((r + c) as f64, (r * c) as f64));
        let x = CMatrix::from_fn(2, 1, |r, _| Complex64::new(1.0 + r as f64, -1.0));
        let b = &a * &x;
        assert!((svd(&a).solve(&b, 1e-12) - x).norm() < 1e-12);
    }
}
