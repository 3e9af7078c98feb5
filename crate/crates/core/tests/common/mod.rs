#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regpoly::polygon::angle_margin_of;
use regpoly::{compute_metrics, generate, Kind, Point, Polygon};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Convex or star-shaped polygon with `3..=max_n` vertices, alternating by
/// seed parity.
pub fn random_polygon(seed: u64, max_n: usize) -> Polygon {
    let mut r = rng(seed ^ 0x5eed);
    let n = r.gen_range(3..=max_n);
    if seed.is_multiple_of(2) {
        generate(&Kind::RandomConvex { n, seed }).unwrap()
    } else {
        generate(&Kind::RandomStar { n, seed }).unwrap()
    }
}

/// Smallest angle margin and smallest relative side length both above
/// `floor`.
pub fn well_conditioned(p: &Polygon, floor: f64) -> bool {
    let m = compute_metrics(p).unwrap();
    m.interior_angle
        .iter()
        .all(|&t| angle_margin_of(t) >= floor)
        && m.side_length.iter().all(|&l| l >= floor * m.perimeter)
}

/// Random well-conditioned polygons, skipping badly shaped draws.
pub fn conditioned_polygons(count: usize, max_n: usize, floor: f64) -> Vec<Polygon> {
    (0u64..)
        .map(|s| random_polygon(s, max_n))
        .filter(|p| well_conditioned(p, floor))
        .take(count)
        .collect()
}

/// Random similarity applied to `p`.
pub fn random_similarity(p: &Polygon, r: &mut ChaCha8Rng) -> Polygon {
    let scale = 10f64.powf(r.gen_range(-2.0..2.0));
    let angle = r.gen_range(0.0..std::f64::consts::TAU);
    let offset = Point::new(r.gen_range(-50.0..50.0), r.gen_range(-50.0..50.0));
    p.transformed(scale, angle, offset).unwrap()
}

/// Uniform draw from the open interval `(lo, hi)`, never exactly zero.
pub fn param_in(lo: f64, hi: f64, r: &mut ChaCha8Rng) -> f64 {
    loop {
        let t = r.gen_range(lo..hi);
        if t != 0.0 {
            return t;
        }
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

pub fn max_vertex_gap(a: &Polygon, b: &Polygon) -> f64 {
    a.vertices()
        .iter()
        .zip(b.vertices())
        .map(|(p, q)| p.dist(*q))
        .fold(0.0, f64::max)
}
