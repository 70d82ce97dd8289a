// The four model operators and the sampled L1/L2/L3 checks.

use wigner_lab::maps::{
    check_l1, check_l2, check_l3, make_l_perp, make_l_u, make_l_uw, make_trace_collapse, random_rank_k_projection,
};
use wigner_lab::subspace::projection_of;
use wigner_lab::{random, ConditionReport, Frame, OperatorMap, SemilinearMap, Sigma};

fn summary(name: &str, l: &OperatorMap, k: usize) {
    let samples = 60;
    let l1 = check_l1(l, k, samples, 1, 1e-8).unwrap();
    let l2 = check_l2(l, k, samples, 2, 1e-8).unwrap();
    let l3: Option<ConditionReport> = match (l1.passed, l1.inferred_m) {
        (true, Some(m)) => Some(check_l3(l, k, m, samples, 3, 1e-8).unwrap()),
        _ => None,
    };
    println!(
        "{name:<28} L1 {:<5} m = {:<6} L2 {:<5} L3 {}",
        l1.passed,
        format!("{:?}", l1.inferred_m),
        l2.passed,
        l3.map_or("skipped".to_string(), |r| r.passed.to_string())
    );
}

fn main() {
    let mut rng = random::rng(5);

    // L_perp(1, 2) sends diag(1, 0) to diag(0, 1).
    let perp = make_l_perp(1, 2).unwrap();
    let e1 = projection_of(&Frame::standard(2, &[0]));
    println!(
        "L_perp(diag(1,0)) = {:?}",
        perp.apply(&e1).unwrap().matrix().diagonal().map(|z| z.re).as_slice()
    );

    // The padded example: C^2 into span(e1', e2'), W = span(e3').
    let u = SemilinearMap::embedding(2, 3);
    let w = Frame::standard(3, &[2]);
    let luw = make_l_uw(&u, &w, 1).unwrap();
    let img = luw.apply(&e1).unwrap();
    println!(
        "L_UW(P_e1) diagonal = {:?}",
        img.matrix().diagonal().map(|z| z.re).as_slice()
    );

    let n = 4;
    let lu = make_l_u(&SemilinearMap::isometry(random::unitary(&mut rng, n), Sigma::Conjugation).unwrap()).unwrap();
    summary("L_U (conj), n = 4, k = 2", &lu, 2);
    summary("L_perp, n = 4, k = 1", &make_l_perp(1, n).unwrap(), 1);

    let w = random::frame(&mut rng, 7, 2);
    let iso = random::isometry_into(&mut rng, &wigner_lab::subspace::ortho_complement(&w), n);
    let luw = make_l_uw(&SemilinearMap::isometry(iso, Sigma::Identity).unwrap(), &w, 2).unwrap();
    summary("L_UW, rank W = 2, k = 2", &luw, 2);

    let p = random_rank_k_projection(n, 2, 9).unwrap();
    summary("trace collapse", &make_trace_collapse(&p, 2).unwrap(), 2);
    summary("0.5 * L_U", &lu.scaled(0.5), 2);
}
