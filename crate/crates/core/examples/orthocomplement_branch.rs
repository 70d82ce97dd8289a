// When n = 2k both L_U and L_perp o L_U preserve rank-k projections; the
// classifier tells them apart.

use wigner_lab::recovery::classify_operator;
use wigner_lab::{families, random, Sigma};

fn main() {
    let mut rng = random::rng(4);
    let (n, k) = (4, 2);
    for sigma in [Sigma::Identity, Sigma::Conjugation] {
        let (direct, _) = families::unitary_instance(&mut rng, n, sigma).unwrap();
        let (twisted, _) = families::orthocomplement_instance(&mut rng, n, k, sigma).unwrap();
        let a = classify_operator(&direct, k, 40, 1, 1e-8).unwrap();
        let b = classify_operator(&twisted, k, 40, 1, 1e-8).unwrap();
        println!(
            "sigma {}: L_U -> {:?}, L_perp o L_U -> {:?}",
            sigma.name(),
            a.tag,
            b.tag
        );
        for note in &b.notes {
            println!("  note: {note}");
        }
    }

    let collapse =
        wigner_lab::maps::make_trace_collapse(&wigner_lab::maps::random_rank_k_projection(n, k, 3).unwrap(), k)
            .unwrap();
    let c = classify_operator(&collapse, k, 40, 1, 1e-8).unwrap();
    println!("trace collapse -> {:?} ({})", c.tag, c.reason.unwrap_or_default());
}
