// Recovering (U, W) from a padded operator and checking the model.

use wigner_lab::recovery::{classify_operator, verify_classification};
use wigner_lab::subspace::gap_distance;
use wigner_lab::{families, random, Frame, Sigma};

fn main() {
    let mut rng = random::rng(42);
    let (n, k) = (4, 2);
    let inst = families::padded_instance(&mut rng, n, n + 2, k, 1, Sigma::Conjugation).unwrap();

    let result = classify_operator(&inst.map, k, 60, 7, 1e-8).unwrap();
    println!("tag {:?}, m = {:?}", result.tag, result.m);
    println!("residual {:.2e}", result.residual.unwrap_or(f64::NAN));
    let u = result.u.as_ref().expect("model");
    let w = result.w.as_ref().expect("model");
    println!("sigma recovered: {}", u.sigma().name());
    println!("gap to the true W: {:.2e}", gap_distance(w, &inst.w).unwrap());

    // U is only determined up to a phase, so compare images of lines.
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let line = Frame::span(&random::unit_vector(&mut rng, n)).unwrap();
        worst = worst.max(gap_distance(&u.image(&line).unwrap(), &inst.u.image(&line).unwrap()).unwrap());
    }
    println!("largest line-image gap over 20 lines: {worst:.2e}");

    let report = verify_classification(&inst.map, &result, 50, 99).unwrap();
    println!("independent check: {report:?}");
    let json = serde_json::to_string(&result).unwrap();
    println!("classification JSON is {} bytes; W has rank {}", json.len(), w.rank());
}
