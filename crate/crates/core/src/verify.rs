//! Desk-scale property suites behind `wigner-lab verify`.
//!
//! Each property runs a fixed number of trials, every trial on its own
//! substream of the suite seed, and reports a pass count. Trials that hit
//! an error count as failures. The rendered summary contains no timings, so
//! a fixed seed always produces the same text.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::families::{
    compatible_pair, noncompatible_adjacent_pair, orthocomplement_instance, orthogonal_pair, padded_instance,
    pair_with_meet, unitary_instance,
};
use crate::graph::{
    build_geodesic, distance, geodesic_through_to_orthogonal, is_ortho_adjacent, max_compatible_in_star,
    max_compatible_in_top, probe_star_maximality, probe_top_maximality, Star, Top,
};
use crate::maps::{make_trace_collapse, random_projection_with};
use crate::random::{self, SeededRng};
use crate::recovery::{classify_operator, Classification, Tag};
use crate::semilinear::Sigma;
use crate::subspace::{gap_distance, is_compatible, is_orthogonal, Frame};
use crate::xset::{
    complementary_member, geher_classify_seeded, local_dimension_seeded, xset_contains, xset_sample, GeherTag,
};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Suite {
    Graph,
    Xset,
    Roundtrip,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "graph" => Ok(Suite::Graph),
            "xset" => Ok(Suite::Xset),
            "roundtrip" => Ok(Suite::Roundtrip),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite '{other}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyTally {
    pub name: String,
    pub passed: usize,
    pub total: usize,
}

impl PropertyTally {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub properties: Vec<PropertyTally>,
}

impl SuiteReport {
    pub fn ok(&self) -> bool {
        self.properties.iter().all(PropertyTally::ok)
    }
}

/// Runs `trial` once per case, each on substream `(seed, tag + index)`.
fn tally<C, F>(name: &str, seed: u64, tag: u64, cases: Vec<C>, trial: F) -> PropertyTally
where
    C: Sync,
    F: Fn(&C, &mut SeededRng) -> Result<bool> + Sync,
{
    let total = cases.len();
    let passed = cases
        .par_iter()
        .enumerate()
        .map(|(i, case)| {
            let mut rng = random::substream(seed, (tag << 32) + i as u64);
            matches!(trial(case, &mut rng), Ok(true))
        })
        .filter(|&ok| ok)
        .count();
    PropertyTally {
        name: name.into(),
        passed,
        total,
    }
}

fn repeat<C: Clone>(items: Vec<C>, times: usize) -> Vec<C> {
    items
        .iter()
        .flat_map(|c| std::iter::repeat_n(c.clone(), times))
        .collect()
}

fn all_pairs(min_gap: usize, max_n: usize) -> Vec<(usize, usize)> {
    (2..=max_n)
        .flat_map(|n| (1..n).map(move |k| (n, k)))
        .filter(|&(n, k)| n >= k + min_gap)
        .collect()
}

fn mutually(family: &[Frame], pred: impl Fn(&Frame, &Frame) -> Result<bool>) -> Result<bool> {
    for (i, a) in family.iter().enumerate() {
        for b in &family[i + 1..] {
            if !pred(a, b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn graph_suite(seed: u64) -> SuiteReport {
    let mut properties = Vec::new();

    let cases: Vec<(usize, usize, usize)> = all_pairs(1, 6)
        .into_iter()
        .flat_map(|(n, k)| ((2 * k).saturating_sub(n)..=k).map(move |c| (n, k, c)))
        .collect();
    properties.push(tally(
        "distance_formula",
        seed,
        1,
        repeat(cases, 4),
        |&(n, k, c), rng| {
            let (x, y) = pair_with_meet(rng, n, k, c)?;
            let d = distance(&x, &y)?;
            let path = build_geodesic(&x, &y)?;
            Ok(d == k - c && path.edge_count() == d)
        },
    ));

    let cliques: Vec<(usize, usize)> = all_pairs(1, 6).into_iter().filter(|&(_, k)| k >= 2).collect();
    properties.push(tally(
        "top_clique",
        seed,
        2,
        repeat(cliques.clone(), 2),
        |&(n, k), rng| {
            let top = Top::new(random::frame(rng, n, k + 1))?;
            let family = max_compatible_in_top(&top);
            let probe = probe_top_maximality(&top, &family, 60, rng.random())?;
            Ok(family.len() == k + 1 && mutually(&family, is_ortho_adjacent)? && probe.extensions == 0)
        },
    ));
    properties.push(tally("star_clique", seed, 3, repeat(cliques, 2), |&(n, k), rng| {
        let star = Star::new(random::frame(rng, n, k - 1))?;
        let family = max_compatible_in_star(&star, &Frame::full(n))?;
        let probe = probe_star_maximality(&star, &Frame::full(n), &family, 60, rng.random())?;
        Ok(family.len() == n - k + 1 && mutually(&family, is_ortho_adjacent)? && probe.extensions == 0)
    }));

    let compat: Vec<(usize, usize)> = all_pairs(1, 6).into_iter().filter(|&(n, k)| n >= 2 * k).collect();
    properties.push(tally(
        "compatible_geodesic",
        seed,
        4,
        repeat(compat, 4),
        |&(n, k), rng| {
            let c = rng.random_range(0..=k);
            let (x, y) = compatible_pair(rng, n, k, c)?;
            let path = geodesic_through_to_orthogonal(&x, &y)?;
            let through = path
                .vertices
                .iter()
                .any(|v| gap_distance(v, &y).map(|g| g <= 1e-8).unwrap_or(false));
            Ok(path.edge_count() == k
                && through
                && mutually(&path.vertices, |a, b| is_compatible(a, b, 1e-8))?
                && is_orthogonal(path.first(), path.last(), 1e-8)?)
        },
    ));

    SuiteReport {
        suite: "graph".into(),
        properties,
    }
}

pub fn xset_suite(seed: u64) -> SuiteReport {
    const TOL: f64 = 1e-8;
    let mut properties = Vec::new();

    let sizes = vec![(2, 1), (3, 1), (3, 2), (4, 2)];
    properties.push(tally(
        "membership_symmetry",
        seed,
        1,
        repeat(sizes, 3),
        |&(n, k), rng| {
            let x = random::frame(rng, n, k);
            let y = random::frame(rng, n, k);
            let sample = xset_sample(&x, &y, 3, rng.random(), TOL)?;
            let mut ok = !sample.points.is_empty();
            for z in &sample.points {
                ok &= xset_contains(&y, &x, z, TOL)?;
                ok &= xset_contains(&x, &y, &complementary_member(&x, &y, z, TOL)?, TOL)?;
            }
            Ok(ok)
        },
    ));

    let adjacent = vec![(2, 1), (3, 1), (3, 2), (4, 2)];
    properties.push(tally(
        "noncompatible_adjacent_curve",
        seed,
        2,
        repeat(adjacent, 2),
        |&(n, k), rng| {
            let (x, y) = noncompatible_adjacent_pair(rng, n, k)?;
            let s = rng.random();
            Ok(
                geher_classify_seeded(&x, &y, TOL, s)? == GeherTag::NonCompatibleAdjacentCurve
                    && local_dimension_seeded(&x, &y, &x, TOL, s)? == 1,
            )
        },
    ));

    properties.push(tally("orthogonal_lines_dimension", seed, 3, vec![(); 5], |_, rng| {
        let (x, y) = orthogonal_pair(rng, 2, 1)?;
        let z = random::frame(rng, 2, 1);
        Ok(local_dimension_seeded(&x, &y, &z, TOL, rng.random())? == 2)
    }));

    properties.push(tally("orthogonal_planes_dimension", seed, 4, vec![(); 3], |_, rng| {
        let (x, y) = orthogonal_pair(rng, 4, 2)?;
        let z = random::frame(rng, 4, 2);
        Ok(local_dimension_seeded(&x, &y, &z, TOL, rng.random())? == 8)
    }));

    let compat = vec![(3, 1, 0), (4, 2, 1), (5, 2, 0), (5, 3, 2)];
    properties.push(tally("compatible_full_interval", seed, 5, compat, |&(n, k, c), rng| {
        let (x, y) = compatible_pair(rng, n, k, c)?;
        Ok(geher_classify_seeded(&x, &y, TOL, rng.random())? == GeherTag::CompatibleFullInterval)
    }));

    SuiteReport {
        suite: "xset".into(),
        properties,
    }
}

fn round_trip_ok(c: &Classification, inst: &crate::families::PaddedInstance, rng: &mut SeededRng) -> Result<bool> {
    let want = if inst.w.rank() == 0 {
        Tag::IsometryInduced
    } else {
        Tag::WAugmented
    };
    if c.tag != want || c.residual.is_none_or(|r| r > 1e-8) {
        return Ok(false);
    }
    let u = c.u.as_ref().expect("accepted classifications carry U");
    let w = c.w.clone().unwrap_or_else(|| Frame::empty(inst.w.ambient_dim()));
    if u.sigma() != inst.u.sigma() || w.rank() != inst.w.rank() {
        return Ok(false);
    }
    if w.rank() > 0 && gap_distance(&w, &inst.w)? > 1e-7 {
        return Ok(false);
    }
    for _ in 0..20 {
        let x = random::frame(rng, inst.u.source_dim(), 1);
        if gap_distance(&u.image(&x)?, &inst.u.image(&x)?)? > 1e-7 {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn roundtrip_suite(seed: u64) -> SuiteReport {
    const TOL: f64 = 1e-8;
    const SAMPLES: usize = 20;
    let mut properties = Vec::new();

    let cases: Vec<(usize, usize, usize, Sigma)> = (3..=5)
        .flat_map(|n| (1..n).map(move |k| (n, k)))
        .flat_map(|(n, k)| (0..=1).map(move |wr| (n, k, wr)))
        .flat_map(|(n, k, wr)| [Sigma::Identity, Sigma::Conjugation].map(|s| (n, k, wr, s)))
        .collect();
    let classified = tally("padded_family", seed, 1, cases.clone(), |&(n, k, wr, sigma), rng| {
        let inst = padded_instance(rng, n, n + wr + 1, k, wr, sigma)?;
        let c = classify_operator(&inst.map, k, SAMPLES, rng.random(), TOL)?;
        round_trip_ok(&c, &inst, rng)
    });
    properties.push(classified);

    properties.push(tally("k_at_most_m", seed, 2, cases, |&(n, k, wr, sigma), rng| {
        let inst = padded_instance(rng, n, n + wr + 1, k, wr, sigma)?;
        let c = classify_operator(&inst.map, k, SAMPLES, rng.random(), TOL)?;
        Ok(n < 2 * k || c.m.is_some_and(|m| m >= k))
    }));

    let sigmas = vec![Sigma::Identity, Sigma::Conjugation, Sigma::Identity];
    properties.push(tally("isometry_branch", seed, 3, sigmas.clone(), |&sigma, rng| {
        let (l, _) = unitary_instance(rng, 4, sigma)?;
        Ok(classify_operator(&l, 2, SAMPLES, rng.random(), TOL)?.tag == Tag::IsometryInduced)
    }));
    properties.push(tally("orthocomplement_branch", seed, 4, sigmas, |&sigma, rng| {
        let (l, _) = orthocomplement_instance(rng, 4, 2, sigma)?;
        Ok(classify_operator(&l, 2, SAMPLES, rng.random(), TOL)?.tag == Tag::OrthoComplementCase)
    }));

    properties.push(tally(
        "collapse_rejected",
        seed,
        5,
        vec![(3, 1), (4, 2)],
        |&(n, k), rng| {
            let p = random_projection_with(rng, n, k)?;
            let c = classify_operator(&make_trace_collapse(&p, k)?, k, SAMPLES, rng.random(), TOL)?;
            Ok(c.tag == Tag::Rejected && c.reason.as_deref() == Some("L2"))
        },
    ));

    SuiteReport {
        suite: "roundtrip".into(),
        properties,
    }
}

pub fn run(suite: Suite, seed: u64) -> Vec<SuiteReport> {
    match suite {
        Suite::Graph => vec![graph_suite(seed)],
        Suite::Xset => vec![xset_suite(seed)],
        Suite::Roundtrip => vec![roundtrip_suite(seed)],
        Suite::All => vec![graph_suite(seed), xset_suite(seed), roundtrip_suite(seed)],
    }
}

/// Plain-text summary: one line per property, then a total.
pub fn render(reports: &[SuiteReport], seed: u64) -> String {
    let mut out = String::new();
    let mut ok = 0;
    let mut total = 0;
    for r in reports {
        let _ = writeln!(out, "suite {} (seed {seed})", r.suite);
        for p in &r.properties {
            let status = if p.ok() { "ok" } else { "FAIL" };
            let _ = writeln!(out, "  {:<32} {:>4}/{:<4} {status}", p.name, p.passed, p.total);
            total += 1;
            ok += usize::from(p.ok());
        }
    }
    let _ = writeln!(out, "{ok}/{total} properties passed");
    out
}
