// Distances, geodesics and maximal compatible cliques in the Grassmann graph.

use wigner_lab::graph::{
    build_geodesic, distance, geodesic_through_to_orthogonal, is_adjacent, max_compatible_in_star,
    max_compatible_in_top, probe_star_maximality, probe_top_maximality, Star, Top,
};
use wigner_lab::subspace::{is_compatible, is_orthogonal};
use wigner_lab::{families, random, tol, Frame};

fn main() {
    let mut rng = random::rng(21);
    let (x, y) = families::pair_with_meet(&mut rng, 6, 3, 0).unwrap();
    let path = build_geodesic(&x, &y).unwrap();
    println!("generic 3-spaces in C^6: distance {}", distance(&x, &y).unwrap());
    println!("geodesic has {} edges", path.edge_count());
    let steps: Vec<bool> = path
        .vertices
        .windows(2)
        .map(|w| is_adjacent(&w[0], &w[1]).unwrap())
        .collect();
    println!("consecutive vertices adjacent: {steps:?}");

    let (a, b) = families::orthogonal_pair(&mut rng, 5, 2).unwrap();
    let through = geodesic_through_to_orthogonal(&a, &b).unwrap();
    let all_compatible = through.vertices.iter().all(|p| {
        through
            .vertices
            .iter()
            .all(|q| is_compatible(p, q, tol::COMPATIBLE).unwrap())
    });
    println!(
        "compatible geodesic: {} edges, all compatible {}, endpoints orthogonal {}",
        through.edge_count(),
        all_compatible,
        is_orthogonal(through.first(), through.last(), 1e-8).unwrap()
    );

    let (n, k) = (5, 2);
    let roof = random::frame(&mut rng, n, k + 1);
    let top = Top::new(roof).unwrap();
    let family = max_compatible_in_top(&top);
    let probe = probe_top_maximality(&top, &family, 300, 1).unwrap();
    println!(
        "top clique size {} (k + 1 = {}), probe {:?}",
        family.len(),
        k + 1,
        probe
    );

    let base = random::frame(&mut rng, n, k - 1);
    let star = Star::new(base).unwrap();
    let ambient = Frame::full(n);
    let family = max_compatible_in_star(&star, &ambient).unwrap();
    let probe = probe_star_maximality(&star, &ambient, &family, 300, 2).unwrap();
    println!(
        "star clique size {} (n - k + 1 = {}), probe {:?}",
        family.len(),
        n - k + 1,
        probe
    );
}
