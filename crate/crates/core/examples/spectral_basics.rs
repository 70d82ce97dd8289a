// Hermitian operators as real vectors: spectra, projections and the
// canonical coordinate basis.

use wigner_lab::hermitian::{from_coords, is_projection, rank_eps, real_coords, spectral_decompose};
use wigner_lab::{random, tol, HermitianBasis, HermitianOperator};

fn main() {
    let a = HermitianOperator::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
    let spec = spectral_decompose(&a);
    println!("eigenvalues of [[2,1],[1,2]]: {:?}", spec.eigenvalues);
    println!("reconstruction error: {:.2e}", (spec.reconstruct() - a.matrix()).norm());

    // Coordinates in the n^2-dimensional real space.
    let basis = HermitianBasis::new(3);
    let mut rng = random::rng(11);
    let h = random::hermitian(&mut rng, 3);
    let c = real_coords(&h, &basis).unwrap();
    let back = from_coords(&c, &basis).unwrap();
    println!("basis size for n = 3: {}", basis.len());
    for i in [0, 3, 4] {
        println!("  element {i}: {:?}", basis.describe(i));
    }
    println!(
        "coordinate round trip error: {:.2e}",
        (back.matrix() - h.matrix()).norm()
    );

    let p = HermitianOperator::from_real_diagonal(&[1.0, 1.0, 0.0]);
    let (ok, rank) = is_projection(&p, tol::SPEC);
    println!("diag(1,1,0): projection = {ok}, rank = {rank:?}, trace = {}", p.trace());
    println!("rank of a random Hermitian 3x3: {}", rank_eps(&h, tol::RANK));
}
