// Meets, joins, orthocomplements, principal angles and compatibility.

use wigner_lab::families;
use wigner_lab::subspace::{
    commutator_norm, gap_distance, is_compatible, join, meet, ortho_complement, principal_angles,
};
use wigner_lab::{random, tol, Frame};

fn main() {
    let x = Frame::standard(4, &[0, 1]);
    let y = Frame::standard(4, &[1, 2]);
    let c = meet(&x, &y, tol::ANGLE).unwrap();
    let s = join(&x, &y).unwrap();
    println!("span(e1,e2) meet span(e2,e3): rank {}", c.rank());
    println!("span(e1,e2) join span(e2,e3): rank {}", s.rank());
    println!("complement of the join: rank {}", ortho_complement(&s).rank());
    println!("compatible: {}", is_compatible(&x, &y, tol::COMPATIBLE).unwrap());

    let mut rng = random::rng(3);
    let (a, b) = families::pair_with_meet(&mut rng, 6, 3, 1).unwrap();
    let angles = principal_angles(&a, &b).unwrap();
    println!("random 3-spaces in C^6 sharing a line:");
    println!("  principal angles {:.4?}", angles.angles);
    println!(
        "  zero angles {} = meet rank {}",
        angles.zero_count(tol::ANGLE),
        meet(&a, &b, tol::ANGLE).unwrap().rank()
    );
    println!("  commutator norm {:.4}", commutator_norm(&a, &b).unwrap());
    println!("  gap {:.4}", gap_distance(&a, &b).unwrap());

    let (p, q) = families::compatible_pair(&mut rng, 6, 3, 1).unwrap();
    println!(
        "compatible pair: commutator {:.2e}, compatible {}",
        commutator_norm(&p, &q).unwrap(),
        is_compatible(&p, &q, tol::COMPATIBLE).unwrap()
    );
}
