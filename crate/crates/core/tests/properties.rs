use proptest::prelude::*;
use wigner_lab::families::{compatible_pair, orthogonal_pair, padded_instance, pair_with_meet};
use wigner_lab::graph::{build_geodesic, distance};
use wigner_lab::hermitian::{from_coords, is_projection, real_coords, spectral_decompose};
use wigner_lab::maps::{make_l_perp, make_l_u, random_rank_k_projection};
use wigner_lab::recovery::{Descended, InducedMap, SubspaceMap};
use wigner_lab::subspace::{
    containment_residual, gap_distance, image_of_projection, is_compatible, is_orthogonal, join, meet,
    principal_angles, projection_of, relative_complement,
};
use wigner_lab::xset::{complementary_member, xset_contains, xset_sample};
use wigner_lab::{random, tol, CMatrix, Frame, HermitianBasis, OperatorMap, SemilinearMap, Sigma};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

/// `(n, k)` with `1 <= k < n <= max`.
fn shape(max: usize) -> impl Strategy<Value = (usize, usize)> {
    (2..=max).prop_flat_map(|n| (Just(n), 1..n))
}

fn hcat(a: &CMatrix, b: &CMatrix) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols() + b.ncols(), |r, c| {
        if c < a.ncols() {
            a[(r, c)]
        } else {
            b[(r, c - a.ncols())]
        }
    })
}

fn sigma() -> impl Strategy<Value = Sigma> {
    prop_oneof![Just(Sigma::Identity), Just(Sigma::Conjugation)]
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn coordinates_round_trip(n in 1usize..=6, seed: u64) {
        let basis = HermitianBasis::new(n);
        let a = random::hermitian(&mut random::rng(seed), n);
        let c = real_coords(&a, &basis).unwrap();
        prop_assert_eq!(c.len(), n * n);
        prop_assert!((from_coords(&c, &basis).unwrap().matrix() - a.matrix()).norm() <= 1e-12);
        let again = real_coords(&from_coords(&c, &basis).unwrap(), &basis).unwrap();
        prop_assert!((again - c).norm() <= 1e-12);
    }

    #[test]
    fn spectra_reconstruct(n in 1usize..=6, seed: u64) {
        let a = random::hermitian(&mut random::rng(seed), n);
        let s = spectral_decompose(&a);
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((s.reconstruct() - a.matrix()).norm() <= tol::SPEC);
    }

    #[test]
    fn projections_have_trace_equal_to_rank((n, k) in shape(6), seed: u64) {
        let p = random_rank_k_projection(n, k, seed).unwrap();
        prop_assert_eq!(is_projection(&p, tol::SPEC), (true, Some(k)));
        prop_assert!((p.trace() - k as f64).abs() <= 1e-9);
        let back = projection_of(&image_of_projection(&p, tol::RANK).unwrap());
        prop_assert!((back.matrix() - p.matrix()).norm() <= 1e-8);
    }

    #[test]
    fn meet_and_join_dimensions(n in 2usize..=6, a in 1usize..=6, b in 1usize..=6, c in 0usize..=6, seed: u64) {
        let (a, b) = (a.min(n), b.min(n));
        let c = c.min(a).min(b);
        let mut rng = random::rng(seed);
        // Gaussian blocks sharing c columns, so that meets are nontrivial.
        let shared = random::gaussian(&mut rng, n, c);
        let x = Frame::span(&hcat(&shared, &random::gaussian(&mut rng, n, a - c))).unwrap();
        let y = Frame::span(&hcat(&shared, &random::gaussian(&mut rng, n, b - c))).unwrap();
        let m = meet(&x, &y, tol::ANGLE).unwrap();
        let j = join(&x, &y).unwrap();
        prop_assert_eq!(m.rank() + j.rank(), x.rank() + y.rank());
        if x.rank() == y.rank() {
            prop_assert_eq!(principal_angles(&x, &y).unwrap().zero_count(tol::ANGLE), m.rank());
        }
        prop_assert!(containment_residual(&x, &m).unwrap() <= 1e-8);
        prop_assert!(containment_residual(&j, &y).unwrap() <= 1e-8);
    }

    #[test]
    fn compatibility_relation((n, k) in shape(6), seed: u64) {
        let mut rng = random::rng(seed);
        let x = random::frame(&mut rng, n, k);
        let y = random::frame(&mut rng, n, k);
        prop_assert!(is_compatible(&x, &x, tol::COMPATIBLE).unwrap());
        prop_assert_eq!(is_compatible(&x, &y, tol::COMPATIBLE).unwrap(), is_compatible(&y, &x, tol::COMPATIBLE).unwrap());
        prop_assert!((gap_distance(&x, &y).unwrap() - gap_distance(&y, &x).unwrap()).abs() <= 1e-14);
    }

    #[test]
    fn compatible_pairs_split_orthogonally((n, k) in shape(6), seed: u64) {
        let mut rng = random::rng(seed);
        let lo = (2 * k).saturating_sub(n);
        let c = lo + (seed as usize % (k - lo + 1));
        let (x, y) = compatible_pair(&mut rng, n, k, c).unwrap();
        let common = meet(&x, &y, tol::ANGLE).unwrap();
        prop_assert_eq!(common.rank(), c);
        let xr = relative_complement(&x, &common).unwrap();
        let yr = relative_complement(&y, &common).unwrap();
        prop_assert_eq!(xr.rank() + c, k);
        prop_assert!(is_orthogonal(&xr, &yr, 1e-8).unwrap());
    }

    #[test]
    fn distance_is_a_metric((n, k) in shape(6), seed: u64) {
        let mut rng = random::rng(seed);
        let lo = (2 * k).saturating_sub(n);
        let (x, y) = pair_with_meet(&mut rng, n, k, lo + seed as usize % (k - lo + 1)).unwrap();
        let z = if seed % 2 == 0 { random::frame(&mut rng, n, k) } else { pair_with_meet(&mut rng, n, k, k.saturating_sub(1).max(lo)).unwrap().0 };
        let d = |a, b| distance(a, b).unwrap();
        prop_assert_eq!(d(&x, &x), 0);
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
    }

    #[test]
    fn geodesic_steps_lose_one_dimension((n, k) in shape(6), seed: u64) {
        let mut rng = random::rng(seed);
        let lo = (2 * k).saturating_sub(n);
        let (x, y) = pair_with_meet(&mut rng, n, k, lo).unwrap();
        let path = build_geodesic(&x, &y).unwrap();
        for (i, w) in path.vertices.windows(2).enumerate() {
            prop_assert_eq!(meet(&w[0], &w[1], tol::ANGLE).unwrap().rank(), k - 1);
            prop_assert_eq!(meet(&x, &w[1], tol::ANGLE).unwrap().rank(), k - i - 1);
        }
    }
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn conjugation_preserves_trace(n in 1usize..=5, s in sigma(), seed: u64) {
        let mut rng = random::rng(seed);
        let l = make_l_u(&SemilinearMap::isometry(random::unitary(&mut rng, n), s).unwrap()).unwrap();
        let a = random::hermitian(&mut rng, n);
        prop_assert!((l.apply(&a).unwrap().trace() - a.trace()).abs() <= 1e-10);
    }

    #[test]
    fn double_orthocomplement_is_identity((n, k) in shape(6), seed: u64) {
        let twice = make_l_perp(n - k, n).unwrap().compose(&make_l_perp(k, n).unwrap()).unwrap();
        let x = random::frame(&mut random::rng(seed), n, k);
        let p = projection_of(&x);
        prop_assert!((twice.apply(&p).unwrap().matrix() - p.matrix()).norm() <= 1e-12);
        let once = make_l_perp(k, n).unwrap().apply(&p).unwrap();
        prop_assert_eq!(is_projection(&once, tol::SPEC), (true, Some(n - k)));
    }

    #[test]
    fn padded_map_sends_x_to_ux_plus_w((n, k) in shape(5), wr in 0usize..=2, s in sigma(), seed: u64) {
        let mut rng = random::rng(seed);
        let inst = padded_instance(&mut rng, n, n + wr + 1, k, wr, s).unwrap();
        let x = random::frame(&mut rng, n, k);
        let want = inst.u.image(&x).unwrap().direct_sum(&inst.w).unwrap();
        let got = image_of_projection(&inst.map.apply(&projection_of(&x)).unwrap(), tol::RANK).unwrap();
        prop_assert!(gap_distance(&got, &want).unwrap() <= 1e-9);
    }

    #[test]
    fn json_round_trip_is_exact((n, k) in shape(4), seed: u64) {
        let mut rng = random::rng(seed);
        let inst = padded_instance(&mut rng, n, n + 1, k, 1, Sigma::Conjugation).unwrap();
        let text = serde_json::to_string(&inst.map).unwrap();
        let back: OperatorMap = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.matrix(), inst.map.matrix());
        let f: Frame = serde_json::from_str(&serde_json::to_string(&inst.w).unwrap()).unwrap();
        prop_assert_eq!(f.columns(), inst.w.columns());
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn xset_membership_laws((n, k) in shape(4), seed: u64) {
        let mut rng = random::rng(seed);
        let x = random::frame(&mut rng, n, k);
        let y = random::frame(&mut rng, n, k);
        let sample = xset_sample(&x, &y, 3, seed, 1e-8).unwrap();
        prop_assert!(!sample.points.is_empty());
        let common = meet(&x, &y, tol::ANGLE).unwrap();
        let span = join(&x, &y).unwrap();
        for z in &sample.points {
            prop_assert!(xset_contains(&y, &x, z, 1e-8).unwrap());
            prop_assert!(xset_contains(&x, &y, &complementary_member(&x, &y, z, 1e-8).unwrap(), 1e-8).unwrap());
            prop_assert!(containment_residual(z, &common).unwrap() <= 1e-7);
            prop_assert!(containment_residual(&span, z).unwrap() <= 1e-7);
        }
    }
}

/// `f_i` obtained from the induced map on rank-`k` subspaces by star descent.
fn level<'a>(l: &'a OperatorMap, k: usize, m: usize, i: usize, seed: u64) -> Box<dyn SubspaceMap + 'a> {
    let mut f: Box<dyn SubspaceMap + 'a> = Box::new(InducedMap::new(l, k, m, 1e-8));
    while f.source_rank() > i {
        f = Box::new(Descended::new(f, 2, seed).unwrap());
    }
    f
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn descended_maps_form_a_chain((n, k) in shape(5), wr in 0usize..=2, s in sigma(), seed: u64) {
        let mut rng = random::rng(seed);
        let inst = padded_instance(&mut rng, n, n + wr, k, wr, s).unwrap();
        let flag = random::frame(&mut rng, n, k);
        let mut previous = None;
        for i in 1..=k {
            let xi = flag.select(&(0..i).collect::<Vec<_>>());
            let img = level(&inst.map, k, k + wr, i, seed).image(&xi).unwrap();
            prop_assert_eq!(img.rank(), wr + i);
            // Star descent reproduces U(X_i) + W at every level.
            let want = inst.u.image(&xi).unwrap().direct_sum(&inst.w).unwrap();
            prop_assert!(gap_distance(&img, &want).unwrap() <= 1e-7);
            if let Some(prev) = previous.replace(img.clone()) {
                prop_assert!(containment_residual(&img, &prev).unwrap() <= 1e-7);
            }
        }
    }

    #[test]
    fn induced_map_preserves_adjacency((n, k) in shape(5), wr in 0usize..=2, s in sigma(), seed: u64) {
        let mut rng = random::rng(seed);
        let inst = padded_instance(&mut rng, n, n + wr, k, wr, s).unwrap();
        let f = InducedMap::new(&inst.map, k, k + wr, 1e-8);
        let lo = (2 * k).saturating_sub(n);
        for c in lo..=k {
            let (x, y) = pair_with_meet(&mut rng, n, k, c).unwrap();
            let d = distance(&f.image(&x).unwrap(), &f.image(&y).unwrap()).unwrap();
            prop_assert_eq!(k - c == 1, d == 1);
        }
    }

    #[test]
    fn orthogonal_inputs_meet_in_w((n, k) in shape(6), wr in 0usize..=2, s in sigma(), seed: u64) {
        prop_assume!(n >= 2 * k);
        let mut rng = random::rng(seed);
        let inst = padded_instance(&mut rng, n, n + wr, k, wr, s).unwrap();
        let f = InducedMap::new(&inst.map, k, k + wr, 1e-8);
        let (x, y) = orthogonal_pair(&mut rng, n, k).unwrap();
        let (fx, fy) = (f.image(&x).unwrap(), f.image(&y).unwrap());
        prop_assert!(is_compatible(&fx, &fy, 1e-8).unwrap());
        prop_assert_eq!(meet(&fx, &fy, tol::ANGLE).unwrap().rank(), wr);
    }
}
