//! Real-linear maps between spaces of Hermitian matrices, the standard
//! projection-preserving constructions, and sampled checks of the three
//! conditions a rank-`k` to rank-`m` projection map is tested against:
//!
//! * **L1** every rank-`k` projection goes to a projection of one fixed rank `m`;
//! * **L2** the map is injective on rank-`k` projections;
//! * **L3** images of any two rank-`k` projections meet in dimension `>= m - k`.
//!
//! The conditions quantify over a continuum, so every check is a seeded
//! falsification attempt: a passing report means "not falsified at N samples".

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hermitian::{
    from_coords, idempotency_residual, is_projection, real_coords, HermitianBasis, HermitianOperator,
};
use crate::json;
use crate::random;
use crate::semilinear::SemilinearMap;
use crate::subspace::{image_of_projection, meet, projection_of, Frame};
use crate::tol;

/// `L: Herm(C^n) -> Herm(C^n')` as a real `n'^2 x n^2` matrix in the
/// canonical Hermitian bases.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMap {
    n: usize,
    n_prime: usize,
    matrix: DMatrix<f64>,
    /// Source projection rank, when known.
    pub k: Option<usize>,
    /// Target projection rank, when known.
    pub m: Option<usize>,
}

impl OperatorMap {
    pub fn new(n: usize, n_prime: usize, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.ncols() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() != n_prime * n_prime {
            return Err(Error::DimensionMismatch {
                expected: n_prime * n_prime,
                found: matrix.nrows(),
            });
        }
        Ok(Self {
            n,
            n_prime,
            matrix,
            k: None,
            m: None,
        })
    }

    /// Tabulates a linear function on the basis elements.
    pub fn from_fn<F>(n: usize, n_prime: usize, f: F) -> Self
    where
        F: Fn(&HermitianOperator) -> HermitianOperator,
    {
        let src = HermitianBasis::new(n);
        let dst = HermitianBasis::new(n_prime);
        let mut matrix = DMatrix::zeros(n_prime * n_prime, n * n);
        for a in 0..src.len() {
            let image = f(&src.element(a));
            let coords = real_coords(&image, &dst).expect("image has target dimension");
            matrix.column_mut(a).copy_from(&coords);
        }
        Self {
            n,
            n_prime,
            matrix,
            k: None,
            m: None,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            n_prime: n,
            matrix: DMatrix::identity(n * n, n * n),
            k: None,
            m: None,
        }
    }

    pub fn with_ranks(mut self, k: Option<usize>, m: Option<usize>) -> Self {
        self.k = k;
        self.m = m;
        self
    }

    pub fn source_dim(&self) -> usize {
        self.n
    }

    pub fn target_dim(&self) -> usize {
        self.n_prime
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            matrix: &self.matrix * s,
            ..self.clone()
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &OperatorMap) -> Result<Self> {
        if inner.n_prime != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: inner.n_prime,
            });
        }
        Ok(Self {
            n: inner.n,
            n_prime: self.n_prime,
            matrix: &self.matrix * &inner.matrix,
            k: inner.k,
            m: self.m,
        })
    }

    pub fn apply(&self, a: &HermitianOperator) -> Result<HermitianOperator> {
        let c = real_coords(a, &HermitianBasis::new(self.n))?;
        from_coords(&(&self.matrix * c), &HermitianBasis::new(self.n_prime))
    }

    /// Largest entrywise difference of the two matrices.
    pub fn max_entry_difference(&self, other: &OperatorMap) -> Result<f64> {
        if self.matrix.shape() != other.matrix.shape() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.len(),
                found: other.matrix.len(),
            });
        }
        Ok((&self.matrix - &other.matrix).amax())
    }
}

impl Serialize for OperatorMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OperatorMapJson {
            n: self.n,
            n_prime: self.n_prime,
            k: self.k,
            m: self.m,
            matrix: json::real_rows(&self.matrix),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for OperatorMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = OperatorMapJson::deserialize(d)?;
        let matrix = json::real_from_rows(&raw.matrix, raw.n * raw.n).map_err(D::Error::custom)?;
        Ok(OperatorMap::new(raw.n, raw.n_prime, matrix)
            .map_err(D::Error::custom)?
            .with_ranks(raw.k, raw.m))
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorMapJson {
    n: usize,
    n_prime: usize,
    k: Option<usize>,
    m: Option<usize>,
    matrix: Vec<Vec<f64>>,
}

/// `A -> U A U*` (with `A` conjugated first for conjugate-linear `U`).
pub fn make_l_u(u: &SemilinearMap) -> Result<OperatorMap> {
    let deviation = u.isometry_defect();
    if deviation > tol::FRAME {
        return Err(Error::NotAnIsometry { deviation });
    }
    Ok(conjugation_map(u))
}

pub(crate) fn conjugation_map(u: &SemilinearMap) -> OperatorMap {
    OperatorMap::from_fn(u.source_dim(), u.target_dim(), |a| u.conjugate_operator(a))
}

/// `A -> tr(A)/k Id - A`, sending `P_X` to `P_{X^⊥}` for `dim X = k`.
pub fn make_l_perp(k: usize, n: usize) -> Result<OperatorMap> {
    if k == 0 || k >= n {
        return Err(Error::BadRank { rank: k, dim: n });
    }
    let id = HermitianOperator::identity(n);
    Ok(OperatorMap::from_fn(n, n, |a| &id.scale(a.trace() / k as f64) - a).with_ranks(Some(k), Some(n - k)))
}

/// Block-diagonal padding: `U A U*` on `W^⊥` and `tr(A)/k Id` on `W`, so
/// `P_X` goes to the projection on `U(X) + W`.
///
/// The range of `U` lies in `W^⊥`, hence `U A U* P_{W^⊥} = U A U*` and the
/// map is `A -> U A U* + tr(A)/k P_W`.
pub fn make_l_uw(u: &SemilinearMap, w: &Frame, k: usize) -> Result<OperatorMap> {
    let deviation = u.isometry_defect();
    if deviation > tol::FRAME {
        return Err(Error::NotAnIsometry { deviation });
    }
    if w.ambient_dim() != u.target_dim() {
        return Err(Error::DimensionMismatch {
            expected: u.target_dim(),
            found: w.ambient_dim(),
        });
    }
    if k == 0 || k > u.source_dim() {
        return Err(Error::BadRank {
            rank: k,
            dim: u.source_dim(),
        });
    }
    let overlap = (w.columns().adjoint() * u.matrix()).norm();
    if overlap > tol::FRAME {
        return Err(Error::NotOrthogonal { overlap });
    }
    Ok(padded_map(u, w, k))
}

pub(crate) fn padded_map(u: &SemilinearMap, w: &Frame, k: usize) -> OperatorMap {
    let pw = projection_of(w);
    OperatorMap::from_fn(u.source_dim(), u.target_dim(), |a| {
        &u.conjugate_operator(a) + &pw.scale(a.trace() / k as f64)
    })
    .with_ranks(Some(k), Some(k + w.rank()))
}

/// `A -> tr(A)/k P`: every rank-`k` projection goes to `P`.
pub fn make_trace_collapse(p: &HermitianOperator, k: usize) -> Result<OperatorMap> {
    match is_projection(p, tol::RANK) {
        (true, Some(r)) if r == k && k > 0 => {}
        _ => {
            return Err(Error::NotAProjection {
                residual: idempotency_residual(p),
            })
        }
    }
    let n = p.dim();
    Ok(OperatorMap::from_fn(n, n, |a| p.scale(a.trace() / k as f64)).with_ranks(Some(k), Some(k)))
}

/// Haar-random rank-`k` projection on `C^n`.
pub fn random_rank_k_projection(n: usize, k: usize, seed: u64) -> Result<HermitianOperator> {
    let mut rng = random::rng(seed);
    random_projection_with(&mut rng, n, k)
}

pub(crate) fn random_projection_with<R: rand::Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    k: usize,
) -> Result<HermitianOperator> {
    if k == 0 || k > n {
        return Err(Error::BadRank { rank: k, dim: n });
    }
    Ok(projection_of(&random::frame(rng, n, k)))
}

/// Seeded rank-`k` probes shared by the three checks.
pub fn probe_projections(n: usize, k: usize, samples: usize, seed: u64) -> Result<Vec<HermitianOperator>> {
    let mut rng = random::rng(seed);
    (0..samples).map(|_| random_projection_with(&mut rng, n, k)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    L1,
    L2,
    L3,
}

/// Inputs on which a condition failed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub inputs: Vec<HermitianOperator>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub samples: usize,
    pub passed: bool,
    /// Number of failing samples (L1) or pairs (L2, L3).
    pub failures: usize,
    /// At most [`MAX_WITNESSES`] of the failures.
    pub witnesses: Vec<Witness>,
    pub inferred_m: Option<usize>,
}

pub const MAX_WITNESSES: usize = 5;

struct Tally {
    failures: usize,
    witnesses: Vec<Witness>,
}

impl Tally {
    fn new() -> Self {
        Self {
            failures: 0,
            witnesses: Vec::new(),
        }
    }

    fn fail(&mut self, inputs: Vec<HermitianOperator>, detail: String) {
        self.failures += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(Witness { inputs, detail });
        }
    }

    fn report(self, condition: Condition, samples: usize, inferred_m: Option<usize>) -> ConditionReport {
        ConditionReport {
            condition,
            samples,
            passed: self.failures == 0,
            failures: self.failures,
            witnesses: self.witnesses,
            inferred_m,
        }
    }
}

fn images(l: &OperatorMap, probes: &[HermitianOperator]) -> Result<Vec<HermitianOperator>> {
    probes.par_iter().map(|p| l.apply(p)).collect()
}

fn check_rank(l: &OperatorMap, k: usize) -> Result<()> {
    if k == 0 || k > l.source_dim() {
        return Err(Error::BadRank {
            rank: k,
            dim: l.source_dim(),
        });
    }
    Ok(())
}

/// L1 on random rank-`k` projections.
pub fn check_l1(l: &OperatorMap, k: usize, samples: usize, seed: u64, tol: f64) -> Result<ConditionReport> {
    check_rank(l, k)?;
    check_l1_on(l, &probe_projections(l.source_dim(), k, samples, seed)?, tol)
}

/// L1 on the given probes. The target rank `m` is taken from the first
/// probe whose image is a projection; a zero image or any other rank fails.
pub fn check_l1_on(l: &OperatorMap, probes: &[HermitianOperator], tol: f64) -> Result<ConditionReport> {
    let imgs = images(l, probes)?;
    let mut tally = Tally::new();
    let mut m = None;
    for (p, img) in probes.iter().zip(&imgs) {
        match is_projection(img, tol) {
            (true, Some(r)) => {
                let want = *m.get_or_insert(r);
                if r == 0 {
                    tally.fail(vec![p.clone()], "image is the zero projection".into());
                } else if r != want {
                    tally.fail(vec![p.clone()], format!("image rank {r}, expected {want}"));
                }
            }
            _ => tally.fail(
                vec![p.clone()],
                format!("image not idempotent (|A^2 - A| = {:e})", idempotency_residual(img)),
            ),
        }
    }
    Ok(tally.report(Condition::L1, probes.len(), m))
}

/// L2 on random rank-`k` projections.
pub fn check_l2(l: &OperatorMap, k: usize, samples: usize, seed: u64, tol: f64) -> Result<ConditionReport> {
    check_rank(l, k)?;
    check_l2_on(l, &probe_projections(l.source_dim(), k, samples, seed)?, tol)
}

/// Every pair of distinct probes (gap above 1e-6) must have images farther
/// apart than `tol`.
pub fn check_l2_on(l: &OperatorMap, probes: &[HermitianOperator], tol: f64) -> Result<ConditionReport> {
    if probes.len() < 2 {
        return Err(Error::PreconditionViolated("L2 needs at least two samples".into()));
    }
    let imgs = images(l, probes)?;
    let rows: Vec<Vec<(usize, f64)>> = (0..probes.len())
        .into_par_iter()
        .map(|i| {
            ((i + 1)..probes.len())
                .filter_map(|j| {
                    let input_gap = (probes[i].matrix() - probes[j].matrix()).norm();
                    let image_gap = (imgs[i].matrix() - imgs[j].matrix()).norm();
                    (input_gap > tol::SAME_PROJECTION && image_gap <= tol).then_some((j, image_gap))
                })
                .collect()
        })
        .collect();
    let mut tally = Tally::new();
    for (i, row) in rows.into_iter().enumerate() {
        for (j, gap) in row {
            tally.fail(
                vec![probes[i].clone(), probes[j].clone()],
                format!("distinct projections with images {gap:e} apart"),
            );
        }
    }
    Ok(tally.report(Condition::L2, probes.len(), None))
}

/// L3 on random rank-`k` projections.
pub fn check_l3(l: &OperatorMap, k: usize, m: usize, samples: usize, seed: u64, tol: f64) -> Result<ConditionReport> {
    check_rank(l, k)?;
    check_l3_on(l, k, m, &probe_projections(l.source_dim(), k, samples, seed)?, tol)
}

/// Over all probe pairs, `dim(im L(P) ∩ im L(Q)) >= m - k`. Fails with
/// `PreconditionViolated` if some image is not a rank-`m` projection.
pub fn check_l3_on(
    l: &OperatorMap,
    k: usize,
    m: usize,
    probes: &[HermitianOperator],
    tol: f64,
) -> Result<ConditionReport> {
    let imgs = images(l, probes)?;
    let frames: Vec<Frame> = imgs
        .iter()
        .map(|img| match is_projection(img, tol) {
            (true, Some(r)) if r == m => image_of_projection(img, tol),
            _ => Err(Error::PreconditionViolated(format!(
                "L3 requires images that are rank-{m} projections"
            ))),
        })
        .collect::<Result<_>>()?;
    let bound = m.saturating_sub(k);
    let rows: Vec<Vec<(usize, usize)>> = if bound == 0 {
        Vec::new()
    } else {
        (0..frames.len())
            .into_par_iter()
            .map(|i| {
                ((i + 1)..frames.len())
                    .filter_map(|j| {
                        let d = meet(&frames[i], &frames[j], tol::ANGLE).map(|f| f.rank()).unwrap_or(0);
                        (d < bound).then_some((j, d))
                    })
                    .collect()
            })
            .collect()
    };
    let mut tally = Tally::new();
    for (i, row) in rows.into_iter().enumerate() {
        for (j, d) in row {
            tally.fail(
                vec![probes[i].clone(), probes[j].clone()],
                format!("images meet in dimension {d} < {bound}"),
            );
        }
    }
    Ok(tally.report(Condition::L3, probes.len(), Some(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semilinear::Sigma;
    use crate::subspace::{join, ortho_complement};
    use num_complex::Complex64;

    fn cm(rows: &[&[Complex64]]) -> HermitianOperator {
        let n = rows.len();
        HermitianOperator::new(crate::CMatrix::from_fn(n, n, |r, c| rows[r][c])).unwrap()
    }

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &HermitianOperator, b: &HermitianOperator, eps: f64) -> bool {
        (a.matrix() - b.matrix()).norm() <= eps
    }

    #[test]
    fn l_u_identity_is_identity_map() {
        let l = make_l_u(&SemilinearMap::identity(2)).unwrap();
        assert!((l.matrix() - DMatrix::<f64>::identity(4, 4)).amax() < 1e-15);
    }

    #[test]
    fn l_u_conjugation_example() {
        let u = SemilinearMap::isometry(crate::CMatrix::identity(2, 2), Sigma::Conjugation).unwrap();
        let l = make_l_u(&u).unwrap();
        let a = cm(&[&[z(0.0, 0.0), z(0.0, 1.0)], &[z(0.0, -1.0), z(0.0, 0.0)]]);
        let expected = cm(&[&[z(0.0, 0.0), z(0.0, -1.0)], &[z(0.0, 1.0), z(0.0, 0.0)]]);
        // Oracle: entrywise conjugation.
        assert!(close(&a.conjugate(), &expected, 0.0));
        assert!(close(&l.apply(&a).unwrap(), &expected, 1e-14));
    }

    #[test]
    fn l_u_embedding_example() {
        let l = make_l_u(&SemilinearMap::embedding(2, 3)).unwrap();
        let img = l.apply(&HermitianOperator::from_real_diagonal(&[1.0, 0.0])).unwrap();
        assert!(close(
            &img,
            &HermitianOperator::from_real_diagonal(&[1.0, 0.0, 0.0]),
            1e-15
        ));
    }

    #[test]
    fn l_u_preserves_trace_and_maps_projections() {
        let mut rng = random::rng(31);
        for sigma in [Sigma::Identity, Sigma::Conjugation] {
            let u = SemilinearMap::isometry(random::isometry_into(&mut rng, &Frame::full(5), 3), sigma).unwrap();
            let l = make_l_u(&u).unwrap();
            for _ in 0..20 {
                let a = random::hermitian(&mut rng, 3);
                assert!((l.apply(&a).unwrap().trace() - a.trace()).abs() < 1e-12);
                let x = random::frame(&mut rng, 3, 2);
                let img = l.apply(&projection_of(&x)).unwrap();
                assert!(close(&img, &projection_of(&u.image(&x).unwrap()), 1e-12));
            }
        }
        let bad = SemilinearMap::unchecked(crate::CMatrix::identity(2, 2) * z(1.5, 0.0), Sigma::Identity);
        assert!(matches!(make_l_u(&bad), Err(Error::NotAnIsometry { .. })));
    }

    #[test]
    fn l_perp_examples() {
        let l = make_l_perp(1, 2).unwrap();
        let img = l.apply(&HermitianOperator::from_real_diagonal(&[1.0, 0.0])).unwrap();
        assert!(close(&img, &HermitianOperator::from_real_diagonal(&[0.0, 1.0]), 1e-15));
        // 1^-1 * tr(I) * I - I = 2I - I.
        let img = l.apply(&HermitianOperator::identity(2)).unwrap();
        assert!(close(&img, &HermitianOperator::identity(2), 1e-15));
        assert!(matches!(make_l_perp(0, 3), Err(Error::BadRank { .. })));
        assert!(matches!(make_l_perp(3, 3), Err(Error::BadRank { .. })));
    }

    #[test]
    fn l_perp_traces_inverse_and_double_complement() {
        let mut rng = random::rng(37);
        for n in 2..7 {
            for k in 1..n {
                let l = make_l_perp(k, n).unwrap();
                let back = make_l_perp(n - k, n).unwrap();
                assert!(l.matrix().clone().try_inverse().is_some());
                for _ in 0..5 {
                    let x = random::frame(&mut rng, n, k);
                    let p = projection_of(&x);
                    let img = l.apply(&p).unwrap();
                    assert!((img.trace() - (n - k) as f64).abs() < 1e-10);
                    assert!(close(&img, &projection_of(&ortho_complement(&x)), 1e-10));
                    assert!(close(&back.apply(&img).unwrap(), &p, 1e-10));
                }
            }
        }
    }

    fn example_three() -> (SemilinearMap, Frame) {
        (SemilinearMap::embedding(2, 3), Frame::standard(3, &[2]))
    }

    #[test]
    fn l_uw_example() {
        let (u, w) = example_three();
        let l = make_l_uw(&u, &w, 1).unwrap();
        let img = l.apply(&projection_of(&Frame::standard(2, &[0]))).unwrap();
        assert!(close(&img, &projection_of(&Frame::standard(3, &[0, 2])), 1e-15));
    }

    #[test]
    fn l_uw_without_padding_is_l_u() {
        let mut rng = random::rng(41);
        let u =
            SemilinearMap::isometry(random::isometry_into(&mut rng, &Frame::full(4), 3), Sigma::Conjugation).unwrap();
        let a = make_l_uw(&u, &Frame::empty(4), 2).unwrap();
        let b = make_l_u(&u).unwrap();
        assert!(a.max_entry_difference(&b).unwrap() < 1e-15);
    }

    #[test]
    fn l_uw_traces_and_images() {
        let mut rng = random::rng(43);
        for (n, k, wr) in [(3, 1, 1), (3, 2, 2), (4, 2, 1), (5, 3, 2)] {
            let np = n + wr + 1;
            let w = random::frame(&mut rng, np, wr);
            let h = ortho_complement(&w);
            let u = SemilinearMap::isometry(random::isometry_into(&mut rng, &h, n), Sigma::Identity).unwrap();
            let l = make_l_uw(&u, &w, k).unwrap();
            for _ in 0..10 {
                let x = random::frame(&mut rng, n, k);
                let img = l.apply(&projection_of(&x)).unwrap();
                // Oracle: the projection on U(X) + W built directly.
                let target = join(&u.image(&x).unwrap(), &w).unwrap();
                assert!(close(&img, &projection_of(&target), 1e-12));
                assert!((img.trace() - (k + wr) as f64).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn l_uw_rejects_overlap() {
        let u = SemilinearMap::embedding(2, 3);
        let w = Frame::standard(3, &[1]);
        assert!(matches!(make_l_uw(&u, &w, 1), Err(Error::NotOrthogonal { .. })));
    }

    #[test]
    fn trace_collapse_examples() {
        let p = random_rank_k_projection(3, 2, 5).unwrap();
        let l = make_trace_collapse(&p, 2).unwrap();
        assert!(close(&l.apply(&p).unwrap(), &p, 1e-12));
        let q = random_rank_k_projection(3, 2, 6).unwrap();
        assert!(close(&l.apply(&q).unwrap(), &p, 1e-12));
        let traceless = HermitianOperator::from_real_diagonal(&[1.0, -1.0, 0.0]);
        assert!(l.apply(&traceless).unwrap().norm() < 1e-14);
        assert!(make_trace_collapse(&HermitianOperator::from_real_diagonal(&[0.5, 0.0, 0.0]), 1).is_err());
        assert!(make_trace_collapse(&p, 1).is_err());
    }

    #[test]
    fn apply_identity_and_linearity() {
        let mut rng = random::rng(47);
        let a = random::hermitian(&mut rng, 3);
        assert!(close(&OperatorMap::identity(3).apply(&a).unwrap(), &a, 1e-14));
        let u = SemilinearMap::isometry(random::unitary(&mut rng, 3), Sigma::Conjugation).unwrap();
        let l = make_l_u(&u).unwrap();
        for _ in 0..20 {
            let a = random::hermitian(&mut rng, 3);
            let b = random::hermitian(&mut rng, 3);
            let (s, t) = (
                random::uniform(&mut rng, -2.0, 2.0),
                random::uniform(&mut rng, -2.0, 2.0),
            );
            let lhs = l.apply(&(&a.scale(s) + &b.scale(t))).unwrap();
            let rhs = &l.apply(&a).unwrap().scale(s) + &l.apply(&b).unwrap().scale(t);
            assert!(close(&lhs, &rhs, 1e-10));
        }
        assert!(matches!(
            l.apply(&HermitianOperator::identity(2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn random_projection_examples() {
        assert!(close(
            &random_rank_k_projection(3, 3, 1).unwrap(),
            &HermitianOperator::identity(3),
            1e-12
        ));
        let p = random_rank_k_projection(2, 1, 99).unwrap();
        assert_eq!(is_projection(&p, 1e-10), (true, Some(1)));
        assert!((p.trace() - 1.0).abs() < 1e-10);
        assert!(random_rank_k_projection(3, 0, 1).is_err());
        assert!(random_rank_k_projection(3, 4, 1).is_err());
    }

    #[test]
    fn random_projection_mean_is_scaled_identity() {
        // Unitary invariance forces E[P] = (k/n) I; Monte Carlo estimate.
        let (n, k) = (3, 1);
        let mut rng = random::rng(2024);
        let mut sum = HermitianOperator::zeros(n);
        let count = 10_000;
        for _ in 0..count {
            sum = &sum + &random_projection_with(&mut rng, n, k).unwrap();
        }
        let mean = sum.scale(1.0 / count as f64);
        let target = HermitianOperator::identity(n).scale(k as f64 / n as f64);
        assert!((mean.matrix() - target.matrix()).camax() < 5e-2);
    }

    #[test]
    fn l1_examples() {
        let mut rng = random::rng(53);
        let w = random::frame(&mut rng, 6, 2);
        let u = SemilinearMap::isometry(
            random::isometry_into(&mut rng, &ortho_complement(&w), 3),
            Sigma::Identity,
        )
        .unwrap();
        let r = check_l1(&make_l_uw(&u, &w, 1).unwrap(), 1, 50, 1, 1e-8).unwrap();
        assert!(r.passed);
        assert_eq!(r.inferred_m, Some(3));

        let r = check_l1(&make_l_perp(2, 5).unwrap(), 2, 50, 1, 1e-8).unwrap();
        assert!(r.passed);
        assert_eq!(r.inferred_m, Some(3));

        let r = check_l1(&OperatorMap::identity(3).scaled(0.5), 1, 10, 1, 1e-8).unwrap();
        assert!(!r.passed);
        assert!(!r.witnesses.is_empty());

        let zero = OperatorMap::identity(3).scaled(0.0);
        assert!(!check_l1(&zero, 1, 10, 1, 1e-8).unwrap().passed);
    }

    #[test]
    fn l2_examples() {
        let mut rng = random::rng(59);
        let u = SemilinearMap::isometry(random::unitary(&mut rng, 3), Sigma::Identity).unwrap();
        assert!(check_l2(&make_l_u(&u).unwrap(), 1, 40, 2, 1e-8).unwrap().passed);
        let p = random_rank_k_projection(3, 1, 4).unwrap();
        let r = check_l2(&make_trace_collapse(&p, 1).unwrap(), 1, 40, 2, 1e-8).unwrap();
        assert!(!r.passed);
        assert_eq!(r.witnesses[0].inputs.len(), 2);
        let (u, w) = example_three();
        assert!(check_l2(&make_l_uw(&u, &w, 1).unwrap(), 1, 40, 2, 1e-8).unwrap().passed);
    }

    #[test]
    fn l3_examples() {
        let (u, w) = example_three();
        let l = make_l_uw(&u, &w, 1).unwrap();
        assert!(check_l3(&l, 1, 2, 40, 3, 1e-8).unwrap().passed);
        let l = make_l_u(&SemilinearMap::identity(3)).unwrap();
        assert!(check_l3(&l, 2, 2, 20, 3, 1e-8).unwrap().passed);
        assert!(matches!(
            check_l3(&OperatorMap::identity(3).scaled(0.5), 1, 1, 5, 3, 1e-8),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn l3_fails_on_diverging_images() {
        // k = 1, m = 2 in C^4: two images meeting in dimension 0 = m - k - 1.
        let p = projection_of(&Frame::standard(2, &[0]));
        let q = projection_of(&Frame::standard(2, &[1]));
        let a = projection_of(&Frame::standard(4, &[0, 1]));
        let b = projection_of(&Frame::standard(4, &[2, 3]));
        // Dual functionals on span{P, Q} under tr(XY), extended by zero on the
        // orthogonal complement: alpha(A) = A_00, beta(A) = A_11.
        let l = OperatorMap::from_fn(2, 4, |x| {
            &a.scale(x.matrix()[(0, 0)].re) + &b.scale(x.matrix()[(1, 1)].re)
        });
        assert!(close(&l.apply(&p).unwrap(), &a, 1e-15));
        assert!(close(&l.apply(&q).unwrap(), &b, 1e-15));
        let r = check_l3_on(&l, 1, 2, &[p, q], 1e-8).unwrap();
        assert!(!r.passed);
        assert_eq!(r.failures, 1);
    }

    #[test]
    fn compose_matches_sequential_application() {
        let mut rng = random::rng(61);
        let u = SemilinearMap::isometry(random::unitary(&mut rng, 4), Sigma::Conjugation).unwrap();
        let lu = make_l_u(&u).unwrap();
        let lp = make_l_perp(2, 4).unwrap();
        let comp = lp.compose(&lu).unwrap();
        let a = random::hermitian(&mut rng, 4);
        let seq = lp.apply(&lu.apply(&a).unwrap()).unwrap();
        assert!(close(&comp.apply(&a).unwrap(), &seq, 1e-12));
    }

    #[test]
    fn operator_map_json() {
        let l = make_l_perp(1, 2).unwrap();
        let v = serde_json::to_value(&l).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["n_prime"], 2);
        assert_eq!(v["k"], 1);
        assert_eq!(v["matrix"].as_array().unwrap().len(), 4);
        let back: OperatorMap = serde_json::from_value(v).unwrap();
        assert_eq!(back, l);
        let bad = r#"{"n":2,"n_prime":2,"k":null,"m":null,"matrix":[[1.0]]}"#;
        assert!(serde_json::from_str::<OperatorMap>(bad).is_err());
    }
}
