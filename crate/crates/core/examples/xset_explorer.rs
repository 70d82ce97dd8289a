// Sampling X_k(X, Y) and estimating its local dimension.

use wigner_lab::xset::{geher_classify, interval_membership_rate, local_dimension_estimates, xset_sample};
use wigner_lab::{families, random, Frame};

fn describe(name: &str, x: &Frame, y: &Frame) {
    let tol = 1e-8;
    let sample = xset_sample(x, y, 6, 17, tol).unwrap();
    let dims: Vec<String> = sample
        .points
        .iter()
        .take(3)
        .enumerate()
        .map(|(i, z)| {
            let d = local_dimension_estimates(x, y, z, tol, i as u64).unwrap();
            format!("{}/{}", d.jacobian, d.pca)
        })
        .collect();
    println!(
        "{name:<34} {:?}, {} members, dims (jacobian/pca) {}",
        geher_classify(x, y, tol).unwrap(),
        sample.points.len(),
        dims.join(" ")
    );
}

fn main() {
    let mut rng = random::rng(8);
    let (x, y) = families::orthogonal_pair(&mut rng, 2, 1).unwrap();
    describe("orthogonal lines in C^2", &x, &y);
    let (x, y) = families::orthogonal_pair(&mut rng, 4, 2).unwrap();
    describe("orthogonal planes in C^4", &x, &y);
    let (x, y) = families::noncompatible_adjacent_pair(&mut rng, 4, 2).unwrap();
    describe("noncompatible adjacent planes", &x, &y);
    describe("identical frames", &x, &x);

    let (x, y) = families::compatible_pair(&mut rng, 5, 2, 0).unwrap();
    let hits = interval_membership_rate(&x, &y, 50, 3, 1e-8).unwrap();
    println!("compatible pair: {hits}/50 interval members lie in X_k");
    let (x, y) = families::noncompatible_adjacent_pair(&mut rng, 5, 2).unwrap();
    let hits = interval_membership_rate(&x, &y, 50, 3, 1e-8).unwrap();
    println!("noncompatible pair: {hits}/50 interval members lie in X_k");
}
