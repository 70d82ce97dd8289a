//! Decomposes a projection-preserving map back into its generating data.
//!
//! Starting from `L`, the induced subspace map `f_k(X) = im L(P_X)` is
//! pushed down one rank at a time by intersecting images over stars,
//! `f_{i-1}(X) = ∩ f_i(X + v)`, until it acts on lines. The common part of all
//! line images is `W`; removing it leaves a map of lines into lines, which is
//! induced by a semilinear isometry `U`. The candidate `L_{U,W}` is accepted
//! only if it reproduces `L` on fresh probes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{is_projection, rank_eps, CMatrix};
use crate::maps::{self, check_l1_on, check_l2_on, check_l3_on, ConditionReport, OperatorMap};
use crate::random;
use crate::semilinear::{SemilinearMap, Sigma};
use crate::subspace::{
    containment_residual, gap_distance, image_of_projection, meet, meet_all, ortho_complement, projection_of, Frame,
};
use crate::tol;

/// Star elements per sample set when descending one level.
pub const DESCENT_SAMPLES: usize = 2;
/// Fresh lines used to confirm `W`.
pub const W_CONFIRMATIONS: usize = 50;
/// Random lines used to validate a reconstructed isometry.
pub const LINE_VALIDATIONS: usize = 100;
/// Probe projections for the final residual.
pub const RESIDUAL_PROBES: usize = 100;
/// Gap allowed between subspaces that should coincide during recovery.
pub const RECOVERY_GAP: f64 = 1e-7;
/// Bound on the entrywise difference between `L` and the rebuilt model.
pub const MATRIX_AGREEMENT: f64 = 1e-6;

const DESCENT_TAG: u64 = 0x0de5;
const W_TAG: u64 = 0x0f1;
const LINES_TAG: u64 = 0x11e;
const PROBE_TAG: u64 = 0x9b0;
const CONDITION_TAG: u64 = 0xc0d;

/// A map from rank-`source_rank` subspaces of `C^source_dim` to subspaces
/// of rank `target_rank`.
pub trait SubspaceMap: Send + Sync {
    fn source_dim(&self) -> usize;
    fn source_rank(&self) -> usize;
    fn target_rank(&self) -> usize;
    fn image(&self, x: &Frame) -> Result<Frame>;
}

fn check_input(map: &dyn SubspaceMap, x: &Frame) -> Result<()> {
    if x.ambient_dim() != map.source_dim() {
        return Err(Error::DimensionMismatch {
            expected: map.source_dim(),
            found: x.ambient_dim(),
        });
    }
    if x.rank() != map.source_rank() {
        return Err(Error::BadRank {
            rank: x.rank(),
            dim: map.source_dim(),
        });
    }
    Ok(())
}

/// `X -> im L(P_X)` on rank-`k` subspaces.
pub struct InducedMap<'a> {
    l: &'a OperatorMap,
    k: usize,
    m: usize,
    tol: f64,
}

impl<'a> InducedMap<'a> {
    pub fn new(l: &'a OperatorMap, k: usize, m: usize, tol: f64) -> Self {
        Self { l, k, m, tol }
    }
}

impl SubspaceMap for InducedMap<'_> {
    fn source_dim(&self) -> usize {
        self.l.source_dim()
    }

    fn source_rank(&self) -> usize {
        self.k
    }

    fn target_rank(&self) -> usize {
        self.m
    }

    fn image(&self, x: &Frame) -> Result<Frame> {
        check_input(self, x)?;
        let img = self.l.apply(&projection_of(x))?;
        match is_projection(&img, self.tol) {
            (true, Some(r)) if r == self.m => image_of_projection(&img, self.tol.max(tol::RANK)),
            _ => Err(Error::ImageNotProjection {
                rank: self.k,
                expected_rank: self.m,
            }),
        }
    }
}

/// `f_{i-1}` built from `f_i` by star intersections.
///
/// Star elements are `X + span((I - P_X) g)` for Gaussian vectors `g` drawn
/// once from the seed, so the map is a pure function of its input. Two
/// disjoint sets of vectors are used and their results must agree.
pub struct Descended<'a> {
    inner: Box<dyn SubspaceMap + 'a>,
    first: Vec<CMatrix>,
    second: Vec<CMatrix>,
}

impl<'a> Descended<'a> {
    pub fn new(inner: Box<dyn SubspaceMap + 'a>, samples: usize, seed: u64) -> Result<Self> {
        if inner.source_rank() < 2 {
            return Err(Error::BadRank {
                rank: inner.source_rank(),
                dim: inner.source_dim(),
            });
        }
        if samples < 2 {
            return Err(Error::PreconditionViolated(
                "star descent needs at least two samples per set".into(),
            ));
        }
        let n = inner.source_dim();
        let mut rng = random::substream(seed, DESCENT_TAG + inner.source_rank() as u64);
        let first = (0..samples).map(|_| random::gaussian(&mut rng, n, 1)).collect();
        let second = (0..samples).map(|_| random::gaussian(&mut rng, n, 1)).collect();
        Ok(Self { inner, first, second })
    }

    fn star_meet(&self, x: &Frame, vectors: &[CMatrix]) -> Result<Frame> {
        let images = vectors
            .iter()
            .map(|g| {
                let v = Frame::span(&x.reject(g))?;
                self.inner.image(&x.direct_sum(&v)?)
            })
            .collect::<Result<Vec<_>>>()?;
        meet_all(images.iter(), tol::ANGLE)
    }
}

impl SubspaceMap for Descended<'_> {
    fn source_dim(&self) -> usize {
        self.inner.source_dim()
    }

    fn source_rank(&self) -> usize {
        self.inner.source_rank() - 1
    }

    fn target_rank(&self) -> usize {
        self.inner.target_rank() - 1
    }

    fn image(&self, x: &Frame) -> Result<Frame> {
        check_input(self, x)?;
        let a = self.star_meet(x, &self.first)?;
        let b = self.star_meet(x, &self.second)?;
        let want = self.target_rank();
        if a.rank() != want || b.rank() != want {
            // Projections of different ranks are at least 1 apart.
            return Err(Error::InconsistentStarImages { gap: 1.0 });
        }
        let gap = gap_distance(&a, &b)?;
        if gap > RECOVERY_GAP {
            return Err(Error::InconsistentStarImages { gap });
        }
        Ok(a)
    }
}

/// Descends from `f` on rank-`i` subspaces down to lines.
pub fn descend_to_lines<'a>(
    f: Box<dyn SubspaceMap + 'a>,
    samples: usize,
    seed: u64,
) -> Result<Box<dyn SubspaceMap + 'a>> {
    let mut current = f;
    while current.source_rank() > 1 {
        current = Box::new(Descended::new(current, samples, seed)?);
    }
    Ok(current)
}

fn line_frame(v: &CMatrix) -> Frame {
    Frame::span(v).expect("random line is nonzero")
}

/// The subspace contained in every line image of `f_1`, checked against
/// [`W_CONFIRMATIONS`] fresh lines.
pub fn extract_w(f1: &dyn SubspaceMap, samples: usize, seed: u64) -> Result<Frame> {
    let n = f1.source_dim();
    let mut rng = random::substream(seed, W_TAG);
    let lines: Vec<Frame> = (0..samples.max(n))
        .map(|_| line_frame(&random::gaussian(&mut rng, n, 1)))
        .collect();
    let images = lines.par_iter().map(|x| f1.image(x)).collect::<Result<Vec<_>>>()?;
    let w = meet_all(images.iter(), tol::ANGLE)?;
    let fresh: Vec<Frame> = (0..W_CONFIRMATIONS)
        .map(|_| line_frame(&random::gaussian(&mut rng, n, 1)))
        .collect();
    let worst = fresh
        .par_iter()
        .map(|x| containment_residual(&f1.image(x)?, &w))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if worst > RECOVERY_GAP {
        return Err(Error::UnstableIntersection(format!(
            "fresh line image misses W by {worst:e}"
        )));
    }
    Ok(w)
}

/// `g(X) = f_1(X) ∩ W^⊥`.
pub struct Trimmed<'a> {
    f1: &'a dyn SubspaceMap,
    w_perp: Frame,
}

impl<'a> Trimmed<'a> {
    pub fn new(f1: &'a dyn SubspaceMap, w: &Frame) -> Self {
        Self {
            f1,
            w_perp: ortho_complement(w),
        }
    }
}

impl SubspaceMap for Trimmed<'_> {
    fn source_dim(&self) -> usize {
        self.f1.source_dim()
    }

    fn source_rank(&self) -> usize {
        1
    }

    fn target_rank(&self) -> usize {
        1
    }

    fn image(&self, x: &Frame) -> Result<Frame> {
        let m = meet(&self.f1.image(x)?, &self.w_perp, tol::ANGLE)?;
        if m.rank() != 1 {
            return Err(Error::RankDeficient {
                rank: m.rank(),
                expected: 1,
            });
        }
        Ok(m)
    }
}

/// Any line map given as a closure.
pub struct LineMap<F> {
    n: usize,
    f: F,
}

impl<F> LineMap<F>
where
    F: Fn(&Frame) -> Result<Frame> + Send + Sync,
{
    pub fn new(n: usize, f: F) -> Self {
        Self { n, f }
    }
}

impl<F> SubspaceMap for LineMap<F>
where
    F: Fn(&Frame) -> Result<Frame> + Send + Sync,
{
    fn source_dim(&self) -> usize {
        self.n
    }

    fn source_rank(&self) -> usize {
        1
    }

    fn target_rank(&self) -> usize {
        1
    }

    fn image(&self, x: &Frame) -> Result<Frame> {
        (self.f)(x)
    }
}

fn unit(n: usize, coeffs: &[(usize, num_complex::Complex64)]) -> Frame {
    let mut v = CMatrix::zeros(n, 1);
    for &(i, z) in coeffs {
        v[(i, 0)] = z;
    }
    line_frame(&v)
}

/// Least-squares coefficients of `v` in the basis `[a, b]`.
fn coefficients(a: &CMatrix, b: &CMatrix, v: &CMatrix) -> Option<(num_complex::Complex64, num_complex::Complex64)> {
    let mut basis = CMatrix::zeros(a.nrows(), 2);
    basis.column_mut(0).copy_from(&a.column(0));
    basis.column_mut(1).copy_from(&b.column(0));
    let sol = crate::svd::svd(&basis).solve(v, 1e-12);
    Some((sol[(0, 0)], sol[(1, 0)]))
}

/// Unitary factor of the polar decomposition.
fn polar(m: &CMatrix) -> CMatrix {
    let s = crate::svd::svd(m);
    s.u * s.v.adjoint()
}

/// Rebuilds the semilinear isometry inducing a line map `g`: columns from
/// `g(e_j)`, relative scales from `g(e_0 + e_j)` and `sigma` from
/// `g(e_0 + i e_1)`. The result is validated on [`LINE_VALIDATIONS`]
/// random lines with gap at most `tol`.
pub fn reconstruct_semilinear(g: &dyn SubspaceMap, tol: f64, seed: u64) -> Result<SemilinearMap> {
    use num_complex::Complex64 as C;
    let n = g.source_dim();
    let one = C::new(1.0, 0.0);
    let u0 = g.image(&unit(n, &[(0, one)]))?.into_columns();
    let mut cols = CMatrix::zeros(u0.nrows(), n);
    cols.column_mut(0).copy_from(&u0.column(0));
    for j in 1..n {
        let uj = g.image(&unit(n, &[(j, one)]))?.into_columns();
        let v = g.image(&unit(n, &[(0, one), (j, one)]))?.into_columns();
        let (a, b) = coefficients(&u0, &uj, &v).ok_or(Error::NotSemilinear { gap: f64::NAN })?;
        if a.norm() < 1e-8 {
            return Err(Error::NotSemilinear { gap: 1.0 });
        }
        cols.column_mut(j).copy_from(&(uj * (b / a)).column(0));
    }

    let sigma = if n >= 2 {
        let v = g.image(&unit(n, &[(0, one), (1, C::new(0.0, 1.0))]))?.into_columns();
        let u1 = cols.columns(1, 1).into_owned();
        let (a, b) = coefficients(&u0, &u1, &v).ok_or(Error::NotSemilinear { gap: f64::NAN })?;
        let ratio = b / a;
        if (ratio - C::new(0.0, 1.0)).norm() <= 1e-6 {
            Sigma::Identity
        } else if (ratio + C::new(0.0, 1.0)).norm() <= 1e-6 {
            Sigma::Conjugation
        } else {
            return Err(Error::SigmaAmbiguous {
                re: ratio.re,
                im: ratio.im,
            });
        }
    } else {
        Sigma::Identity
    };

    let u = SemilinearMap::isometry(polar(&cols), sigma)?.with_canonical_phase();
    let mut rng = random::substream(seed, LINES_TAG);
    let lines: Vec<Frame> = (0..LINE_VALIDATIONS)
        .map(|_| line_frame(&random::gaussian(&mut rng, n, 1)))
        .collect();
    let worst = lines
        .par_iter()
        .map(|x| gap_distance(&g.image(x)?, &u.image(x)?))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    if worst > tol {
        return Err(Error::NotSemilinear { gap: worst });
    }
    Ok(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tag {
    IsometryInduced,
    OrthoComplementCase,
    WAugmented,
    Rejected,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub tag: Tag,
    #[serde(rename = "U")]
    pub u: Option<SemilinearMap>,
    #[serde(rename = "W")]
    pub w: Option<Frame>,
    /// Largest `|L(P) - model(P)|_F` over the probes; absent when no model
    /// was built.
    pub residual: Option<f64>,
    pub reports: Vec<ConditionReport>,
    pub k: usize,
    pub m: Option<usize>,
    /// Short code for a rejection: `L1`, `L2`, `L3`, `KExceedsM`,
    /// `RecoveryFailed` or `ResidualTooLarge`.
    pub reason: Option<String>,
    pub notes: Vec<String>,
}

impl Classification {
    fn rejected(k: usize, m: Option<usize>, reports: Vec<ConditionReport>, reason: &str, notes: Vec<String>) -> Self {
        Self {
            tag: Tag::Rejected,
            u: None,
            w: None,
            residual: None,
            reports,
            k,
            m,
            reason: Some(reason.into()),
            notes,
        }
    }

    pub fn is_rejected(&self) -> bool {
        self.tag == Tag::Rejected
    }
}

/// A fitted model before acceptance.
struct Fit {
    u: SemilinearMap,
    w: Frame,
    residual: f64,
    matrix_difference: f64,
}

fn model_for(tag: Tag, u: &SemilinearMap, w: Option<&Frame>, k: usize) -> Result<OperatorMap> {
    match tag {
        Tag::IsometryInduced => Ok(maps::conjugation_map(u)),
        Tag::OrthoComplementCase => maps::make_l_perp(k, u.target_dim())?.compose(&maps::conjugation_map(u)),
        Tag::WAugmented => {
            let w = w.ok_or_else(|| Error::PreconditionViolated("WAugmented needs W".into()))?;
            Ok(maps::padded_map(u, w, k))
        }
        Tag::Rejected => Err(Error::NothingToVerify),
    }
}

fn residual_against(l: &OperatorMap, model: &OperatorMap, k: usize, seed: u64) -> Result<(f64, f64)> {
    let mut rng = random::substream(seed, PROBE_TAG);
    let probes = (0..RESIDUAL_PROBES)
        .map(|_| maps::random_projection_with(&mut rng, l.source_dim(), k))
        .collect::<Result<Vec<_>>>()?;
    let residual = probes
        .par_iter()
        .map(|p| Ok((l.apply(p)?.matrix() - model.apply(p)?.matrix()).norm()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok((residual, l.max_entry_difference(model)?))
}

/// Descent, `W` extraction and reconstruction for an `L` already known to
/// pass the three conditions with target rank `m`.
fn fit_general(l: &OperatorMap, k: usize, m: usize, seed: u64, tol: f64) -> Result<Fit> {
    let f = InducedMap::new(l, k, m, tol.max(1e-8));
    let f1 = descend_to_lines(Box::new(f), DESCENT_SAMPLES, seed)?;
    let w = extract_w(f1.as_ref(), l.source_dim() + 2, seed)?;
    if w.rank() + k != m {
        return Err(Error::UnstableIntersection(format!(
            "common part of line images has rank {}, expected {}",
            w.rank(),
            m - k
        )));
    }
    let g = Trimmed::new(f1.as_ref(), &w);
    let u = reconstruct_semilinear(&g, RECOVERY_GAP, seed)?;
    let tag = if w.rank() == 0 {
        Tag::IsometryInduced
    } else {
        Tag::WAugmented
    };
    let model = model_for(tag, &u, Some(&w), k)?;
    let (residual, matrix_difference) = residual_against(l, &model, k, seed)?;
    Ok(Fit {
        u,
        w,
        residual,
        matrix_difference,
    })
}

fn accepts(fit: &Fit, tol: f64) -> bool {
    fit.residual <= tol && fit.matrix_difference <= MATRIX_AGREEMENT
}

/// Runs the three condition checks on `samples` seeded probes, then fits
/// and validates a model. Failures of the fit are returned as a `Rejected`
/// classification; only invalid arguments produce an `Err`.
pub fn classify_operator(l: &OperatorMap, k: usize, samples: usize, seed: u64, tol: f64) -> Result<Classification> {
    let n = l.source_dim();
    if k == 0 || k >= n {
        return Err(Error::BadRank { rank: k, dim: n });
    }
    let probes = maps::probe_projections(n, k, samples, random_seed(seed))?;
    let l1 = check_l1_on(l, &probes, tol)?;
    let m = l1.inferred_m;
    if !l1.passed {
        return Ok(Classification::rejected(k, m, vec![l1], "L1", Vec::new()));
    }
    let m = m.expect("passing L1 infers m");
    let l2 = check_l2_on(l, &probes, tol)?;
    let l3 = check_l3_on(l, k, m, &probes, tol)?;
    let failed = [(&l2, "L2"), (&l3, "L3")]
        .into_iter()
        .find(|(r, _)| !r.passed)
        .map(|(_, c)| c);
    let reports = vec![l1, l2, l3];
    if let Some(code) = failed {
        return Ok(Classification::rejected(k, Some(m), reports, code, Vec::new()));
    }
    if n >= 2 * k && m < k {
        return Ok(Classification::rejected(
            k,
            Some(m),
            reports,
            "KExceedsM",
            vec![format!("inferred m = {m} < k = {k} with n = {n} >= 2k")],
        ));
    }

    let mut notes = Vec::new();
    let direct = fit_general(l, k, m, seed, tol);
    let ortho = if m == k && n == 2 * k && l.target_dim() == n {
        let flipped = maps::make_l_perp(k, n)?.compose(l)?;
        Some(fit_general(&flipped, k, k, seed, tol).and_then(|fit| {
            // The flipped map must be induced by an isometry, and the
            // residual is measured against `L` itself.
            if fit.w.rank() != 0 {
                return Err(Error::UnstableIntersection("flipped map has nonzero W".into()));
            }
            let model = model_for(Tag::OrthoComplementCase, &fit.u, None, k)?;
            let (residual, matrix_difference) = residual_against(l, &model, k, seed)?;
            Ok(Fit {
                residual,
                matrix_difference,
                ..fit
            })
        }))
    } else {
        None
    };

    let direct_ok = matches!(&direct, Ok(fit) if accepts(fit, tol));
    let ortho_ok = matches!(&ortho, Some(Ok(fit)) if accepts(fit, tol));
    if direct_ok && ortho_ok {
        notes.push("both the isometry and the orthocomplement model fit; reporting the isometry".into());
    }

    let attempts = [("isometry", Some(direct)), ("orthocomplement", ortho)];
    let mut best_residual: Option<f64> = None;
    let mut code = "RecoveryFailed";
    for (label, attempt) in attempts {
        match attempt {
            None => {}
            Some(Ok(fit)) if accepts(&fit, tol) => {
                let tag = match (label, fit.w.rank()) {
                    ("orthocomplement", _) => Tag::OrthoComplementCase,
                    (_, 0) => Tag::IsometryInduced,
                    _ => Tag::WAugmented,
                };
                return Ok(Classification {
                    tag,
                    w: (tag == Tag::WAugmented).then_some(fit.w),
                    u: Some(fit.u),
                    residual: Some(fit.residual),
                    reports,
                    k,
                    m: Some(m),
                    reason: None,
                    notes,
                });
            }
            Some(Ok(fit)) => {
                code = "ResidualTooLarge";
                best_residual = Some(best_residual.map_or(fit.residual, |r| r.min(fit.residual)));
                notes.push(format!(
                    "{label} model residual {:e}, matrix difference {:e}",
                    fit.residual, fit.matrix_difference
                ));
            }
            Some(Err(e)) => notes.push(format!("{label} model: {e}")),
        }
    }
    let mut out = Classification::rejected(k, Some(m), reports, code, notes);
    out.residual = best_residual;
    Ok(out)
}

fn random_seed(seed: u64) -> u64 {
    seed ^ CONDITION_TAG
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub residual: f64,
    pub matrix_difference: f64,
    pub passed: bool,
}

/// Rebuilds the model named by `result` and measures it against `L` on
/// `probes` fresh rank-`k` projections.
pub fn verify_classification(
    l: &OperatorMap,
    result: &Classification,
    probes: usize,
    seed: u64,
) -> Result<VerificationReport> {
    if result.is_rejected() {
        return Err(Error::NothingToVerify);
    }
    let u = result
        .u
        .as_ref()
        .ok_or_else(|| Error::PreconditionViolated("classification has no U".into()))?;
    let model = model_for(result.tag, u, result.w.as_ref(), result.k)?;
    let mut rng = random::substream(seed, PROBE_TAG + 1);
    let mut residual: f64 = 0.0;
    for _ in 0..probes {
        let p = maps::random_projection_with(&mut rng, l.source_dim(), result.k)?;
        residual = residual.max((l.apply(&p)?.matrix() - model.apply(&p)?.matrix()).norm());
    }
    let matrix_difference = l.max_entry_difference(&model)?;
    Ok(VerificationReport {
        residual,
        matrix_difference,
        passed: residual <= MATRIX_AGREEMENT && matrix_difference <= MATRIX_AGREEMENT,
    })
}

/// Numerical rank of a projection image, for reporting.
pub fn image_rank(l: &OperatorMap, x: &Frame) -> Result<usize> {
    Ok(rank_eps(&l.apply(&projection_of(x))?, tol::RANK))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{make_l_perp, make_l_u, make_l_uw, make_trace_collapse, random_rank_k_projection};
    use crate::subspace::join;
    use num_complex::Complex64;

    fn random_isometry(seed: u64, n: usize, n_prime: usize, sigma: Sigma) -> SemilinearMap {
        let mut rng = random::rng(seed);
        SemilinearMap::isometry(random::isometry_into(&mut rng, &Frame::full(n_prime), n), sigma).unwrap()
    }

    fn padded_family(seed: u64, n: usize, k: usize, wr: usize, sigma: Sigma) -> (OperatorMap, SemilinearMap, Frame) {
        let np = n + wr + 1;
        let mut rng = random::rng(seed);
        let w = random::frame(&mut rng, np, wr);
        let u = SemilinearMap::isometry(random::isometry_into(&mut rng, &ortho_complement(&w), n), sigma).unwrap();
        (make_l_uw(&u, &w, k).unwrap(), u, w)
    }

    #[test]
    fn induced_map_examples() {
        let mut rng = random::rng(3);
        let u = random_isometry(1, 3, 4, Sigma::Conjugation);
        let l = make_l_u(&u).unwrap();
        let f = InducedMap::new(&l, 2, 2, 1e-8);
        for _ in 0..10 {
            let x = random::frame(&mut rng, 3, 2);
            assert!(gap_distance(&f.image(&x).unwrap(), &u.image(&x).unwrap()).unwrap() <= 1e-8);
        }
        let l = make_l_perp(1, 3).unwrap();
        let f = InducedMap::new(&l, 1, 2, 1e-8);
        let x = random::frame(&mut rng, 3, 1);
        assert!(gap_distance(&f.image(&x).unwrap(), &ortho_complement(&x)).unwrap() <= 1e-8);

        let (l, u, w) = padded_family(5, 3, 1, 1, Sigma::Identity);
        let f = InducedMap::new(&l, 1, 2, 1e-8);
        let x = random::frame(&mut rng, 3, 1);
        let want = join(&u.image(&x).unwrap(), &w).unwrap();
        assert!(gap_distance(&f.image(&x).unwrap(), &want).unwrap() <= 1e-8);

        let half = OperatorMap::identity(3).scaled(0.5);
        assert!(matches!(
            InducedMap::new(&half, 1, 1, 1e-8).image(&x),
            Err(Error::ImageNotProjection { .. })
        ));
    }

    #[test]
    fn descent_examples() {
        let mut rng = random::rng(7);
        for sigma in [Sigma::Identity, Sigma::Conjugation] {
            let (l, u, w) = padded_family(11, 5, 3, 2, sigma);
            let f3 = InducedMap::new(&l, 3, 5, 1e-8);
            let f2 = Descended::new(Box::new(f3), 2, 1).unwrap();
            for _ in 0..5 {
                let x = random::frame(&mut rng, 5, 2);
                let want = join(&u.image(&x).unwrap(), &w).unwrap();
                let got = f2.image(&x).unwrap();
                assert!(gap_distance(&got, &want).unwrap() <= 1e-8);
                // Chain: f_2(X) ⊆ f_3(X + v).
                let z = x
                    .direct_sum(&Frame::span(&x.reject(&random::gaussian(&mut rng, 5, 1))).unwrap())
                    .unwrap();
                let top = InducedMap::new(&l, 3, 5, 1e-8).image(&z).unwrap();
                assert!(containment_residual(&top, &got).unwrap() <= 1e-7);
            }
            let f1 = Descended::new(Box::new(f2), 2, 1).unwrap();
            let x = random::frame(&mut rng, 5, 1);
            let want = join(&u.image(&x).unwrap(), &w).unwrap();
            assert!(gap_distance(&f1.image(&x).unwrap(), &want).unwrap() <= 1e-8);
        }
        let u = random_isometry(2, 4, 4, Sigma::Identity);
        let l = make_l_u(&u).unwrap();
        let f1 = descend_to_lines(Box::new(InducedMap::new(&l, 2, 2, 1e-8)), 2, 3).unwrap();
        let x = random::frame(&mut rng, 4, 1);
        assert!(gap_distance(&f1.image(&x).unwrap(), &u.image(&x).unwrap()).unwrap() <= 1e-8);
    }

    #[test]
    fn descent_detects_non_star_structure() {
        // A map on planes of C^4 whose star images do not share a line.
        let f = LineMapRank2;
        let d = Descended::new(Box::new(f), 2, 5).unwrap();
        let x = Frame::standard(4, &[0]);
        assert!(matches!(d.image(&x), Err(Error::InconsistentStarImages { .. })));
    }

    /// Sends a plane to a pseudo-random plane depending on all of its
    /// coordinates, so star images meet in nothing consistent.
    struct LineMapRank2;

    impl SubspaceMap for LineMapRank2 {
        fn source_dim(&self) -> usize {
            4
        }
        fn source_rank(&self) -> usize {
            2
        }
        fn target_rank(&self) -> usize {
            2
        }
        fn image(&self, x: &Frame) -> Result<Frame> {
            let p = projection_of(x);
            let seed = (p.matrix().iter().map(|z| z.re.abs() + z.im.abs()).sum::<f64>() * 1e6) as u64;
            let mut rng = random::rng(seed);
            Ok(random::frame(&mut rng, 4, 2))
        }
    }

    #[test]
    fn extract_w_examples() {
        let (l, _, w) = padded_family(13, 4, 2, 2, Sigma::Identity);
        let f1 = descend_to_lines(Box::new(InducedMap::new(&l, 2, 4, 1e-8)), 2, 1).unwrap();
        let got = extract_w(f1.as_ref(), 6, 2).unwrap();
        assert_eq!(got.rank(), 2);
        assert!(gap_distance(&got, &w).unwrap() <= 1e-8);

        let u = random_isometry(17, 3, 5, Sigma::Identity);
        let l = make_l_u(&u).unwrap();
        let f1 = InducedMap::new(&l, 1, 1, 1e-8);
        assert_eq!(extract_w(&f1, 3, 2).unwrap().rank(), 0);
    }

    #[test]
    fn reconstruct_examples() {
        let id = LineMap::new(3, |x: &Frame| Ok(x.clone()));
        let u = reconstruct_semilinear(&id, 1e-8, 1).unwrap();
        assert_eq!(u.sigma(), Sigma::Identity);
        assert!((u.matrix() - CMatrix::identity(3, 3)).norm() < 1e-10);

        let conj = LineMap::new(3, |x: &Frame| Frame::span(&x.columns().map(|z| z.conj())));
        let probe = unit(3, &[(0, Complex64::new(1.0, 0.0)), (1, Complex64::new(0.0, 1.0))]);
        let want = unit(3, &[(0, Complex64::new(1.0, 0.0)), (1, Complex64::new(0.0, -1.0))]);
        assert!(gap_distance(&conj.image(&probe).unwrap(), &want).unwrap() < 1e-14);
        assert_eq!(
            reconstruct_semilinear(&conj, 1e-8, 1).unwrap().sigma(),
            Sigma::Conjugation
        );

        let mut rng = random::rng(19);
        let v = SemilinearMap::isometry(random::unitary(&mut rng, 4), Sigma::Identity).unwrap();
        let vv = v.clone();
        let g = LineMap::new(4, move |x: &Frame| vv.image(x));
        let u = reconstruct_semilinear(&g, 1e-8, 2).unwrap();
        for _ in 0..20 {
            let x = random::frame(&mut rng, 4, 1);
            assert!(gap_distance(&u.image(&x).unwrap(), &v.image(&x).unwrap()).unwrap() <= 1e-8);
        }
        let z = u.matrix()[(0, 0)];
        assert!(z.im.abs() < 1e-12 && z.re >= 0.0);
    }

    #[test]
    fn reconstruct_rejects_non_semilinear() {
        // Fixes coordinate lines and their sums but warps generic lines.
        let g = LineMap::new(3, |x: &Frame| {
            let v = x.columns().map(|z| Complex64::from_polar(z.norm(), 2.0 * z.arg()));
            Frame::span(&v)
        });
        assert!(reconstruct_semilinear(&g, 1e-8, 1).is_err());
    }

    #[test]
    fn classify_examples() {
        let l = make_l_u(&random_isometry(23, 5, 5, Sigma::Identity)).unwrap();
        let c = classify_operator(&l, 2, 40, 1, 1e-8).unwrap();
        assert_eq!(c.tag, Tag::IsometryInduced, "{:?}", c.notes);
        assert!(c.residual.unwrap() <= 1e-8);

        let mut rng = random::rng(29);
        let v = SemilinearMap::isometry(random::unitary(&mut rng, 4), Sigma::Identity).unwrap();
        let l = make_l_perp(2, 4).unwrap().compose(&make_l_u(&v).unwrap()).unwrap();
        let c = classify_operator(&l, 2, 40, 1, 1e-8).unwrap();
        assert_eq!(c.tag, Tag::OrthoComplementCase, "{:?}", c.notes);

        let p = random_rank_k_projection(3, 1, 1).unwrap();
        let c = classify_operator(&make_trace_collapse(&p, 1).unwrap(), 1, 40, 1, 1e-8).unwrap();
        assert_eq!(c.tag, Tag::Rejected);
        assert_eq!(c.reason.as_deref(), Some("L2"));
    }

    #[test]
    fn classify_padded_family() {
        for sigma in [Sigma::Identity, Sigma::Conjugation] {
            let (l, u, w) = padded_family(31, 4, 2, 1, sigma);
            let c = classify_operator(&l, 2, 30, 3, 1e-8).unwrap();
            assert_eq!(c.tag, Tag::WAugmented, "{:?}", c.notes);
            assert!(gap_distance(c.w.as_ref().unwrap(), &w).unwrap() <= 1e-7);
            let got = c.u.as_ref().unwrap();
            assert_eq!(got.sigma(), sigma);
            let mut rng = random::rng(1);
            for _ in 0..20 {
                let x = random::frame(&mut rng, 4, 1);
                assert!(gap_distance(&got.image(&x).unwrap(), &u.image(&x).unwrap()).unwrap() <= 1e-7);
            }
            let v = verify_classification(&l, &c, 50, 4).unwrap();
            assert!(v.passed && v.residual <= 1e-8);
        }
    }

    #[test]
    fn verify_examples() {
        let l = OperatorMap::identity(3);
        let c = classify_operator(&l, 1, 20, 1, 1e-8).unwrap();
        assert_eq!(c.tag, Tag::IsometryInduced);
        let v = verify_classification(&l, &c, 20, 1).unwrap();
        assert!(v.residual <= 1e-12);

        let mut bad = c.clone();
        let mut m = bad.u.as_ref().unwrap().matrix().clone();
        m[(0, 1)] += Complex64::new(1e-3, 0.0);
        bad.u = Some(SemilinearMap::unchecked(m, Sigma::Identity));
        let v = verify_classification(&l, &bad, 50, 1).unwrap();
        assert!(v.residual >= 1e-4);
        assert!(!v.passed);

        let p = random_rank_k_projection(3, 1, 1).unwrap();
        let r = classify_operator(&make_trace_collapse(&p, 1).unwrap(), 1, 20, 1, 1e-8).unwrap();
        assert!(matches!(
            verify_classification(&l, &r, 5, 1),
            Err(Error::NothingToVerify)
        ));
    }

    #[test]
    fn classify_rejects_scaled_map() {
        let c = classify_operator(&OperatorMap::identity(3).scaled(0.5), 1, 20, 1, 1e-8).unwrap();
        assert_eq!(c.reason.as_deref(), Some("L1"));
        assert_eq!(c.reports.len(), 1);
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["tag"], "Rejected");
        assert!(v["U"].is_null() && v["W"].is_null());
    }

    #[test]
    fn image_rank_reports_target_rank() {
        let (l, _, _) = padded_family(37, 3, 1, 2, Sigma::Identity);
        assert_eq!(image_rank(&l, &Frame::standard(3, &[0])).unwrap(), 3);
    }
}
