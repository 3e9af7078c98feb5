//! Canonical and random polygon generators.

use std::f64::consts::{PI, TAU};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metrics::compute_metrics;
use crate::point::Point;
use crate::polygon::{angle_margin, Polygon};

const MAX_ATTEMPTS: usize = 10_000;
/// Random generators resample until every angle margin and every relative
/// side length is at least this large.
const QUALITY_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub enum Kind {
    /// Vertices on the circle of radius `radius` at angles `2πk/n`.
    Regular { n: usize, radius: f64 },
    /// Axis-aligned `a × b` rectangle with a corner at the origin.
    Rectangle { a: f64, b: f64 },
    /// `(0,-h1), (w,0), (0,h2), (-w,0)`, symmetric across the y-axis.
    Kite { w: f64, h1: f64, h2: f64 },
    /// Random convex polygon built from a closed fan of edge vectors sorted
    /// by direction.
    RandomConvex { n: usize, seed: u64 },
    /// Unit-circumradius regular polygon with each coordinate displaced
    /// uniformly in `[-eps, eps]`.
    PerturbedRegular { n: usize, eps: f64, seed: u64 },
    /// Random star-shaped (usually non-convex) polygon: jittered polar
    /// angles with radii in `[0.35, 1]`.
    RandomStar { n: usize, seed: u64 },
}

pub fn generate(kind: &Kind) -> Result<Polygon> {
    match *kind {
        Kind::Regular { n, radius } => {
            check_n(n)?;
            check_positive("radius", radius)?;
            Polygon::new(regular_vertices(n, radius))
        }
        Kind::Rectangle { a, b } => {
            check_positive("a", a)?;
            check_positive("b", b)?;
            Polygon::new(vec![
                Point::new(0., 0.),
                Point::new(a, 0.),
                Point::new(a, b),
                Point::new(0., b),
            ])
        }
        Kind::Kite { w, h1, h2 } => {
            check_positive("w", w)?;
            check_positive("h1", h1)?;
            check_positive("h2", h2)?;
            Polygon::new(vec![
                Point::new(0., -h1),
                Point::new(w, 0.),
                Point::new(0., h2),
                Point::new(-w, 0.),
            ])
        }
        Kind::RandomConvex { n, seed } => {
            check_n(n)?;
            resample(seed, |rng| valtr_convex(n, rng))
        }
        Kind::PerturbedRegular { n, eps, seed } => {
            check_n(n)?;
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(Error::InvalidParams(format!(
                    "eps must be finite and non-negative, got {eps}"
                )));
            }
            let base = regular_vertices(n, 1.0);
            resample(seed, |rng| {
                base.iter()
                    .map(|&p| p + Point::new(rng.gen_range(-eps..=eps), rng.gen_range(-eps..=eps)))
                    .collect()
            })
        }
        Kind::RandomStar { n, seed } => {
            check_n(n)?;
            resample(seed, |rng| {
                let sector = TAU / n as f64;
                (0..n)
                    .map(|k| {
                        let phi = sector * (k as f64 + rng.gen_range(-0.4..0.4));
                        let r = rng.gen_range(0.35..1.0);
                        Point::new(r * phi.cos(), r * phi.sin())
                    })
                    .collect()
            })
        }
    }
}

/// `2 sqrt(N tan(π/N))`, the quotient of the regular N-gon.
pub fn regular_quotient(n: usize) -> f64 {
    let n = n as f64;
    2.0 * (n * (PI / n).tan()).sqrt()
}

fn regular_vertices(n: usize, radius: f64) -> Vec<Point> {
    (0..n)
        .map(|k| {
            let a = TAU * k as f64 / n as f64;
            Point::new(radius * a.cos(), radius * a.sin())
        })
        .collect()
}

fn check_n(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidParams(format!("need n >= 3, got {n}")));
    }
    Ok(())
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::InvalidParams(format!(
            "{name} must be positive and finite, got {v}"
        )));
    }
    Ok(())
}

fn well_conditioned(p: &Polygon) -> bool {
    let Ok(m) = compute_metrics(p) else {
        return false;
    };
    m.interior_angle
        .iter()
        .all(|&t| angle_margin(t) >= QUALITY_FLOOR)
        && m.side_length
            .iter()
            .all(|&l| l >= QUALITY_FLOOR * m.perimeter)
}

fn resample(seed: u64, mut draw: impl FnMut(&mut ChaCha8Rng) -> Vec<Point>) -> Result<Polygon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        if let Ok(p) = Polygon::new(draw(&mut rng)) {
            if well_conditioned(&p) {
                return Ok(p);
            }
        }
    }
    Err(Error::InvalidParams(format!(
        "no valid polygon after {MAX_ATTEMPTS} draws"
    )))
}

/// Splits sorted coordinates into two monotone chains and returns the
/// coordinate increments, which sum to zero.
fn chain_increments(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut c: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    c.sort_by(f64::total_cmp);
    let (min, max) = (c[0], c[n - 1]);
    let (mut last_a, mut last_b) = (min, min);
    let mut out = Vec::with_capacity(n);
    for &x in &c[1..n - 1] {
        if rng.gen_bool(0.5) {
            out.push(x - last_a);
            last_a = x;
        } else {
            out.push(last_b - x);
            last_b = x;
        }
    }
    out.push(max - last_a);
    out.push(last_b - max);
    out
}

fn valtr_convex(n: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let xs = chain_increments(rng, n);
    let mut ys = chain_increments(rng, n);
    ys.shuffle(rng);
    let mut edges: Vec<Point> = xs
        .into_iter()
        .zip(ys)
        .map(|(x, y)| Point::new(x, y))
        .collect();
    edges.sort_by(|a, b| a.y.atan2(a.x).total_cmp(&b.y.atan2(b.x)));
    let mut cur = Point::default();
    edges
        .into_iter()
        .map(|e| {
            let p = cur;
            cur = cur + e;
            p
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_square() {
        let p = generate(&Kind::Regular { n: 4, radius: 1.0 }).unwrap();
        let v = p.vertices();
        assert_eq!(v[0], Point::new(1.0, 0.0));
        assert!((v[1] - Point::new(0.0, 1.0)).norm() < 1e-15);
        assert!((v[2] - Point::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((v[3] - Point::new(0.0, -1.0)).norm() < 1e-15);
        assert!((v[0].dist(v[1]) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn kite_sides() {
        let p = generate(&Kind::Kite {
            w: 1.0,
            h1: 1.0,
            h2: 3.0,
        })
        .unwrap();
        assert_eq!(p.vertices()[0], Point::new(0.0, -1.0));
        let m = compute_metrics(&p).unwrap();
        let want = [2f64.sqrt(), 10f64.sqrt(), 10f64.sqrt(), 2f64.sqrt()];
        for (a, b) in m.side_length.iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn random_convex_is_deterministic_and_convex() {
        let a = generate(&Kind::RandomConvex { n: 6, seed: 42 }).unwrap();
        let b = generate(&Kind::RandomConvex { n: 6, seed: 42 }).unwrap();
        assert_eq!(a, b);
        for seed in 0..50 {
            let p = generate(&Kind::RandomConvex { n: 9, seed }).unwrap();
            let m = compute_metrics(&p).unwrap();
            assert_eq!(p.n(), 9);
            assert!(m.interior_angle.iter().all(|&t| t < PI));
        }
    }

    #[test]
    fn random_star_is_valid() {
        let mut saw_reflex = false;
        for seed in 0..50 {
            let p = generate(&Kind::RandomStar { n: 8, seed }).unwrap();
            let m = compute_metrics(&p).unwrap();
            saw_reflex |= m.interior_angle.iter().any(|&t| t > PI);
        }
        assert!(saw_reflex);
    }

    #[test]
    fn invalid_params() {
        assert!(generate(&Kind::Regular { n: 2, radius: 1.0 }).is_err());
        assert!(generate(&Kind::Rectangle { a: 0.0, b: 1.0 }).is_err());
        assert!(generate(&Kind::Kite {
            w: 1.0,
            h1: -1.0,
            h2: 1.0
        })
        .is_err());
        assert!(generate(&Kind::PerturbedRegular {
            n: 5,
            eps: f64::NAN,
            seed: 0
        })
        .is_err());
    }
}
