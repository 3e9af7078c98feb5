//! Exact constructors for the three one-parameter deformation families and
//! their admissible parameter intervals.
//!
//! Every constructor intersects lines directly from the unperturbed vertices,
//! so the closed-form perimeter and area laws in [`exact_change`] hold to
//! machine precision for any admissible parameter, not just to first order.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{compute_metrics, PolygonMetrics};
use crate::point::Point;
use crate::polygon::{angle_margin, Polygon, ANGLE_EPS};
use crate::variations::psi_unchecked;

/// Fraction of the polygon diameter bounding Slide and MoveVertex ranges.
const LENGTH_CAP: f64 = 0.1;
/// Fraction of the smallest affected angle margin bounding Tilt ranges.
const ANGLE_CAP: f64 = 0.5;
const RANGE_SHRINK: f64 = 0.9;
const RANGE_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Parallel translation of side `i`; `t` is a signed distance along the
    /// outward normal.
    Slide,
    /// Rotation of side `i` about its midpoint; `t` in radians, positive `t`
    /// decreases `θ_i`.
    Tilt,
    /// Translation of vertex `i` parallel to the diagonal joining its
    /// neighbours; `t` is a signed distance towards vertex `i + 1`.
    MoveVertex,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Slide, Family::Tilt, Family::MoveVertex];

    pub fn name(self) -> &'static str {
        match self {
            Family::Slide => "slide",
            Family::Tilt => "tilt",
            Family::MoveVertex => "move",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "s" | "slide" => Ok(Family::Slide),
            "t" | "tilt" => Ok(Family::Tilt),
            "m" | "move" | "move_vertex" | "move-vertex" => Ok(Family::MoveVertex),
            other => Err(Error::InvalidParams(format!("unknown family {other:?}"))),
        }
    }
}

/// A single perturbation: family, side or vertex index, and parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Move {
    pub family: Family,
    pub index: usize,
    pub t: f64,
}

impl Move {
    pub fn new(family: Family, index: usize, t: f64) -> Self {
        Self { family, index, t }
    }
}

/// Open interval `(lo, hi)` of parameters, `lo < 0 < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleRange {
    pub lo: f64,
    pub hi: f64,
}

impl AdmissibleRange {
    pub fn contains(&self, t: f64) -> bool {
        self.lo < t && t < self.hi
    }

    pub fn clamp(&self, t: f64) -> f64 {
        t.clamp(self.lo, self.hi)
    }

    pub fn scaled(&self, f: f64) -> Self {
        Self {
            lo: self.lo * f,
            hi: self.hi * f,
        }
    }
}

/// Which endpoint of a side stays fixed in [`rotate_about_vertex`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Start,
    End,
}

fn check_index(p: &Polygon, i: usize) -> Result<()> {
    if i >= p.n() {
        return Err(Error::IndexOutOfRange { index: i, n: p.n() });
    }
    Ok(())
}

fn is_parallel(c: f64, len: f64) -> bool {
    c.abs() <= ANGLE_EPS.sin() * len
}

fn replace(p: &Polygon, changes: &[(usize, Point)], t: f64) -> Result<Polygon> {
    let mut v = p.vertices().to_vec();
    for &(k, q) in changes {
        v[k] = q;
    }
    Polygon::from_ccw(v).map_err(|e| Error::OutOfRange {
        t,
        reason: e.to_string(),
    })
}

/// A side pushed through zero length comes back reversed; the result can
/// still be a simple polygon but it is not the requested move.
fn keep_direction(dir: Point, a: Point, b: Point, t: f64) -> Result<()> {
    if (b - a).dot(dir) <= 0.0 {
        return Err(Error::OutOfRange {
            t,
            reason: "side would reverse".into(),
        });
    }
    Ok(())
}

pub fn slide(p: &Polygon, i: usize, t: f64) -> Result<Polygon> {
    check_index(p, i)?;
    if t == 0.0 {
        return Ok(p.clone());
    }
    let n = p.n();
    let i = i as isize;
    let (prev, a, b, next) = (
        p.vertex(i - 1),
        p.vertex(i),
        p.vertex(i + 1),
        p.vertex(i + 2),
    );
    let nu = (b - a).normalized().right_perp();
    let e_prev = a - prev;
    let e_next = b - next;
    let (d1, d2) = (nu.dot(e_prev), nu.dot(e_next));
    if is_parallel(d1, e_prev.norm()) || is_parallel(d2, e_next.norm()) {
        return Err(Error::ParallelAdjacentSide(i as usize));
    }
    let new_a = a + (t / d1) * e_prev;
    let new_b = b + (t / d2) * e_next;
    keep_direction(b - a, new_a, new_b, t)?;
    let i = i as usize;
    replace(p, &[(i, new_a), ((i + 1) % n, new_b)], t)
}

/// Endpoints of side `i` after turning its line counterclockwise by `angle`
/// about `pivot`, each re-intersected with the adjacent side's line.
/// `pivot` is given as `a + s (b - a)`.
fn rotated_endpoints(p: &Polygon, i: usize, angle: f64, s: f64) -> Result<(Point, Point)> {
    let i = i as isize;
    let (prev, a, b, next) = (
        p.vertex(i - 1),
        p.vertex(i),
        p.vertex(i + 1),
        p.vertex(i + 2),
    );
    let len = a.dist(b);
    let dir = (b - a).normalized().rotated(angle);
    let sin = angle.sin();
    let e_prev = a - prev;
    let e_next = next - b;
    let (c1, c2) = (e_prev.cross(dir), e_next.cross(dir));
    // Pivot offsets from a and b along the old side, times sin(angle), give
    // the signed displacement of each endpoint along its adjacent line.
    let new_a = if s == 0.0 {
        a
    } else {
        if is_parallel(c1, e_prev.norm()) {
            return Err(Error::ParallelAdjacentSide(i as usize));
        }
        a + (s * len * sin / c1) * e_prev
    };
    let new_b = if s == 1.0 {
        b
    } else {
        if is_parallel(c2, e_next.norm()) {
            return Err(Error::ParallelAdjacentSide(i as usize));
        }
        b + (-(1.0 - s) * len * sin / c2) * e_next
    };
    Ok((new_a, new_b))
}

pub fn tilt(p: &Polygon, i: usize, t: f64) -> Result<Polygon> {
    check_index(p, i)?;
    if t == 0.0 {
        return Ok(p.clone());
    }
    let (a, b) = rotated_endpoints(p, i, t, 0.5)?;
    let dir = (p.vertices()[(i + 1) % p.n()] - p.vertices()[i]).rotated(t);
    keep_direction(dir, a, b, t)?;
    replace(p, &[(i, a), ((i + 1) % p.n(), b)], t)
}

pub fn move_vertex(p: &Polygon, i: usize, t: f64) -> Result<Polygon> {
    check_index(p, i)?;
    if t == 0.0 {
        return Ok(p.clone());
    }
    let k = i as isize;
    let d = (p.vertex(k + 1) - p.vertex(k - 1)).normalized();
    replace(p, &[(i, p.vertex(k) + t * d)], t)
}

/// Rotates side `i` about one of its endpoints by `phi` radians
/// (counterclockwise for positive `phi`); the other endpoint slides along
/// its adjacent line.
pub fn rotate_about_vertex(p: &Polygon, i: usize, endpoint: Endpoint, phi: f64) -> Result<Polygon> {
    check_index(p, i)?;
    if phi == 0.0 {
        return Ok(p.clone());
    }
    let s = match endpoint {
        Endpoint::Start => 0.0,
        Endpoint::End => 1.0,
    };
    let (a, b) = rotated_endpoints(p, i, phi, s)?;
    let dir = (p.vertices()[(i + 1) % p.n()] - p.vertices()[i]).rotated(phi);
    keep_direction(dir, a, b, phi)?;
    replace(p, &[(i, a), ((i + 1) % p.n(), b)], phi)
}

/// `(tilt, slide)` parameters whose composition `slide ∘ tilt` reproduces
/// [`rotate_about_vertex`]: tilt by `phi`, then slide the tilted side back
/// onto the fixed endpoint.
pub fn rotation_as_tilt_slide(
    p: &Polygon,
    i: usize,
    endpoint: Endpoint,
    phi: f64,
) -> Result<(f64, f64)> {
    check_index(p, i)?;
    let half = 0.5 * p.vertex(i as isize).dist(p.vertex(i as isize + 1));
    let s = match endpoint {
        Endpoint::Start => -half * phi.sin(),
        Endpoint::End => half * phi.sin(),
    };
    Ok((phi, s))
}

pub fn rotate_about_vertex_composed(
    p: &Polygon,
    i: usize,
    endpoint: Endpoint,
    phi: f64,
) -> Result<Polygon> {
    let (t, s) = rotation_as_tilt_slide(p, i, endpoint, phi)?;
    slide(&tilt(p, i, t)?, i, s)
}

pub fn apply(p: &Polygon, mv: Move) -> Result<Polygon> {
    match mv.family {
        Family::Slide => slide(p, mv.index, mv.t),
        Family::Tilt => tilt(p, mv.index, mv.t),
        Family::MoveVertex => move_vertex(p, mv.index, mv.t),
    }
}

fn tighten(lo: &mut f64, hi: &mut f64, root: f64) {
    if root.is_finite() {
        if root > 0.0 {
            *hi = hi.min(root);
        } else if root < 0.0 {
            *lo = lo.max(root);
        }
    }
}

/// Halves each end of `(lo, hi)` until every sampled parameter on that side
/// builds a valid polygon.
fn validate_range(mut lo: f64, mut hi: f64, valid: impl Fn(f64) -> bool) -> AdmissibleRange {
    let side_ok =
        |end: f64| (1..=RANGE_SAMPLES).all(|k| valid(end * k as f64 / RANGE_SAMPLES as f64));
    for _ in 0..64 {
        if side_ok(hi) {
            break;
        }
        hi *= 0.5;
    }
    for _ in 0..64 {
        if side_ok(lo) {
            break;
        }
        lo *= 0.5;
    }
    AdmissibleRange { lo, hi }
}

/// Conservative open interval of parameters for which `family` at index `i`
/// yields a valid polygon.
pub fn admissible_range(p: &Polygon, family: Family, i: usize) -> Result<AdmissibleRange> {
    check_index(p, i)?;
    let m = compute_metrics(p)?;
    let k = i as isize;
    let (mut lo, mut hi) = match family {
        Family::Slide | Family::MoveVertex => {
            let cap = LENGTH_CAP * p.diameter();
            (-cap, cap)
        }
        Family::Tilt => {
            let cap = ANGLE_CAP * angle_margin(m.theta(i)).min(angle_margin(m.theta(i + 1)));
            (-cap, cap)
        }
    };
    match family {
        Family::Slide => {
            let (prev, a, b, next) = (
                p.vertex(k - 1),
                p.vertex(k),
                p.vertex(k + 1),
                p.vertex(k + 2),
            );
            let nu = m.outward_normal[i];
            // vertex i reaches vertex i-1, vertex i+1 reaches vertex i+2,
            // the side itself collapses
            tighten(&mut lo, &mut hi, -nu.dot(a - prev));
            tighten(&mut lo, &mut hi, -nu.dot(b - next));
            let k_cot = 1.0 / m.theta(i).tan() + 1.0 / m.theta(i + 1).tan();
            tighten(&mut lo, &mut hi, -m.side_length[i] / k_cot);
        }
        Family::MoveVertex => {
            let (pp, prev, cur, next, nn) = (
                p.vertex(k - 2),
                p.vertex(k - 1),
                p.vertex(k),
                p.vertex(k + 1),
                p.vertex(k + 2),
            );
            let d = (next - prev).normalized();
            // vertex i becomes collinear with a neighbouring side's line
            let e = prev - pp;
            tighten(&mut lo, &mut hi, -e.cross(cur - prev) / e.cross(d));
            let e = nn - next;
            tighten(&mut lo, &mut hi, -e.cross(cur - next) / e.cross(d));
        }
        Family::Tilt => {}
    }
    Ok(validate_range(RANGE_SHRINK * lo, RANGE_SHRINK * hi, |t| {
        apply(p, Move::new(family, i, t)).is_ok()
    }))
}

/// Admissible range for [`rotate_about_vertex`], built like the Tilt range.
pub fn rotate_range(p: &Polygon, i: usize, endpoint: Endpoint) -> Result<AdmissibleRange> {
    check_index(p, i)?;
    let m = compute_metrics(p)?;
    let cap = ANGLE_CAP * angle_margin(m.theta(i)).min(angle_margin(m.theta(i + 1)));
    Ok(validate_range(
        -RANGE_SHRINK * cap,
        RANGE_SHRINK * cap,
        |phi| rotate_about_vertex(p, i, endpoint, phi).is_ok(),
    ))
}

/// Closed-form perimeter and area increments of a move.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactChange {
    pub d_perimeter: f64,
    pub d_area: f64,
}

/// Exact perimeter and area increments of `mv`, evaluated from the metrics
/// of the unperturbed polygon in cancellation-free form.
pub fn exact_change(m: &PolygonMetrics, mv: Move) -> ExactChange {
    let n = m.n();
    let i = mv.index;
    let t = mv.t;
    match mv.family {
        Family::Slide => {
            let (ti, tj) = (m.theta(i), m.theta(i + 1));
            let k_cot = 1.0 / ti.tan() + 1.0 / tj.tan();
            ExactChange {
                d_perimeter: t * (psi_unchecked(ti) + psi_unchecked(tj)),
                d_area: t * m.side_length[i] + 0.5 * t * t * k_cot,
            }
        }
        Family::Tilt => {
            let (ti, tj) = (m.theta(i), m.theta(i + 1));
            let l = m.side_length[i];
            let (st, sh) = (t.sin(), (0.5 * t).sin());
            let (den_i, den_j) = ((ti - t).sin(), (tj + t).sin());
            // sin θ - sin(θ ∓ t) via sum-to-product
            let near = (st + 2.0 * (ti - 0.5 * t).cos() * sh) / den_i;
            let far = (-st - 2.0 * (tj + 0.5 * t).cos() * sh) / den_j;
            ExactChange {
                d_perimeter: 0.5 * l * (near + far),
                d_area: 0.125 * l * l * st * st * (ti + tj).sin() / (den_i * den_j),
            }
        }
        Family::MoveVertex => {
            let (a, b) = (m.side_length[(i + n - 1) % n], m.side_length[i]);
            let (cm, cp) = (m.diag_angle_minus[i].cos(), m.diag_angle_plus[i].cos());
            let ra = (a * a + 2.0 * t * a * cm + t * t).sqrt();
            let rb = (b * b - 2.0 * t * b * cp + t * t).sqrt();
            ExactChange {
                d_perimeter: (2.0 * t * a * cm + t * t) / (ra + a)
                    + (t * t - 2.0 * t * b * cp) / (rb + b),
                d_area: 0.0,
            }
        }
    }
}

/// `Q(P_t) - Q(P)` for `Q = perimeter / sqrt(area)`, without subtracting two
/// nearly equal quotients.
pub fn quotient_change(perimeter: f64, area: f64, change: ExactChange) -> f64 {
    let new_area = area + change.d_area;
    if new_area.is_nan() || new_area <= 0.0 {
        return f64::INFINITY;
    }
    let (sa, sb) = (area.sqrt(), new_area.sqrt());
    (change.d_perimeter * sa - perimeter * change.d_area / (sa + sb)) / (sa * sb)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use approx::assert_relative_eq;

    use super::*;
    use crate::generate::{generate, Kind};

    fn square() -> Polygon {
        generate(&Kind::Rectangle { a: 1.0, b: 1.0 }).unwrap()
    }

    fn pts(p: &Polygon) -> Vec<[f64; 2]> {
        p.vertices().iter().map(|&q| q.into()).collect()
    }

    #[test]
    fn slide_square_bottom() {
        let s = square();
        let inward = slide(&s, 0, -0.1).unwrap();
        assert_eq!(pts(&inward), vec![[0., 0.1], [1., 0.1], [1., 1.], [0., 1.]]);
        assert_relative_eq!(inward.perimeter(), 3.8, epsilon = 1e-15);
        assert_relative_eq!(inward.area(), 0.9, epsilon = 1e-15);
        let outward = slide(&s, 0, 0.1).unwrap();
        assert_relative_eq!(outward.perimeter(), 4.2, epsilon = 1e-15);
        assert_relative_eq!(outward.area(), 1.1, epsilon = 1e-15);
    }

    #[test]
    fn slide_equilateral_triangle() {
        let tri = Polygon::new(vec![
            Point::new(0., 0.),
            Point::new(1., 0.),
            Point::new(0.5, 0.75f64.sqrt()),
        ])
        .unwrap();
        let out = slide(&tri, 1, 0.05).unwrap();
        let s3 = 3f64.sqrt();
        assert_relative_eq!(out.perimeter(), 3.0 + 0.05 * 2.0 * s3, max_relative = 1e-14);
        assert_relative_eq!(
            out.area(),
            s3 / 4.0 + 0.05 + 0.0025 * (2.0 / s3) / 2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn tilt_square_bottom() {
        let t = 0.1f64;
        let out = tilt(&square(), 0, t).unwrap();
        let h = 0.5 * t.tan();
        assert_relative_eq!(out.vertices()[0].y, -h, max_relative = 1e-14);
        assert_relative_eq!(out.vertices()[1].y, h, max_relative = 1e-14);
        assert_relative_eq!(out.perimeter(), 3.0 + 1.0 / t.cos(), max_relative = 1e-15);
        assert_relative_eq!(out.area(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn tilt_sign_convention() {
        let p = generate(&Kind::RandomConvex { n: 6, seed: 5 }).unwrap();
        let m0 = compute_metrics(&p).unwrap();
        for i in 0..6 {
            let t = 0.5 * admissible_range(&p, Family::Tilt, i).unwrap().hi;
            let m1 = compute_metrics(&tilt(&p, i, t).unwrap()).unwrap();
            assert_relative_eq!(m1.theta(i), m0.theta(i) - t, epsilon = 1e-12);
            assert_relative_eq!(m1.theta(i + 1), m0.theta(i + 1) + t, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_parameter_is_identity() {
        let p = generate(&Kind::RandomStar { n: 7, seed: 2 }).unwrap();
        for i in 0..7 {
            assert_eq!(slide(&p, i, 0.0).unwrap(), p);
            assert_eq!(tilt(&p, i, 0.0).unwrap(), p);
            assert_eq!(move_vertex(&p, i, 0.0).unwrap(), p);
            assert_eq!(rotate_about_vertex(&p, i, Endpoint::End, 0.0).unwrap(), p);
        }
    }

    #[test]
    fn move_apex_of_right_triangle() {
        let tri = Polygon::new(vec![
            Point::new(0., 0.),
            Point::new(4., 0.),
            Point::new(0., 3.),
        ])
        .unwrap();
        let out = move_vertex(&tri, 2, 0.5).unwrap();
        assert_eq!(out.vertices()[2], Point::new(-0.5, 3.0));
        assert_eq!(out.area(), 6.0);
        let m = compute_metrics(&out).unwrap();
        assert_relative_eq!(m.side_length[1], 29.25f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(m.side_length[2], 9.25f64.sqrt(), max_relative = 1e-15);
        let ch = exact_change(
            &compute_metrics(&tri).unwrap(),
            Move::new(Family::MoveVertex, 2, 0.5),
        );
        assert_relative_eq!(12.0 + ch.d_perimeter, out.perimeter(), max_relative = 1e-15);
    }

    #[test]
    fn move_square_corner_increases_perimeter() {
        let s = square();
        for i in 0..4 {
            let out = move_vertex(&s, i, 0.2).unwrap();
            assert_relative_eq!(out.area(), 1.0, max_relative = 1e-15);
            assert!(out.perimeter() > 4.0);
        }
    }

    #[test]
    fn ranges_on_square() {
        let s = square();
        let r = admissible_range(&s, Family::Slide, 0).unwrap();
        assert!(r.hi >= 0.05 && r.lo <= -0.05, "{r:?}");
        for i in 0..4 {
            let r = admissible_range(&s, Family::Tilt, i).unwrap();
            assert!(r.lo > -PI / 2.0 && r.hi < PI / 2.0);
        }
        assert!(matches!(
            admissible_range(&s, Family::Slide, 4),
            Err(Error::IndexOutOfRange { index: 4, n: 4 })
        ));
    }

    #[test]
    fn rotate_square_bottom_about_origin() {
        let out = rotate_about_vertex(&square(), 0, Endpoint::Start, 0.05).unwrap();
        assert_eq!(out.vertices()[0], Point::new(0., 0.));
        assert_eq!(out.vertices()[1].x, 1.0);
        assert_relative_eq!(out.vertices()[1].y, 0.05f64.tan(), max_relative = 1e-14);
    }

    #[test]
    fn out_of_range_is_an_error() {
        assert!(matches!(
            slide(&square(), 0, -1.5),
            Err(Error::OutOfRange { .. })
        ));
        assert!(matches!(
            tilt(&square(), 0, 1.6),
            Err(Error::OutOfRange { .. })
        ));
        assert!(move_vertex(&square(), 0, 5.0).is_ok());
    }

    #[test]
    fn family_parsing() {
        assert_eq!("s".parse::<Family>().unwrap(), Family::Slide);
        assert_eq!("Tilt".parse::<Family>().unwrap(), Family::Tilt);
        assert_eq!("m".parse::<Family>().unwrap(), Family::MoveVertex);
        assert!("x".parse::<Family>().is_err());
    }
}
