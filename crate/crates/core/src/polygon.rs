use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::point::Point;

/// Interior angles closer than this (radians) to 0, π or 2π are rejected.
pub const ANGLE_EPS: f64 = 1e-9;
/// Sides shorter than this fraction of the perimeter are rejected.
pub const LENGTH_EPS: f64 = 1e-12;
/// Relative (to the bounding-box diagonal) tolerance of the simplicity test.
pub const SIMPLICITY_EPS: f64 = 1e-12;

/// A simple, positively oriented polygon with at least three vertices and no
/// straight or cusp vertices.
///
/// Constructed only through [`Polygon::new`], so every value satisfies those
/// invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl Polygon {
    /// Validates `vertices`, reversing clockwise input to counterclockwise
    /// order. Reversal keeps the first vertex in place.
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        check_basic(&vertices)?;
        if signed_area(&vertices) < 0.0 {
            vertices[1..].reverse();
        }
        Self::from_ccw(vertices)
    }

    /// Validates a vertex list that must already be counterclockwise.
    pub(crate) fn from_ccw(vertices: Vec<Point>) -> Result<Self> {
        check_basic(&vertices)?;
        if !is_simple(&vertices) {
            return Err(Error::InvalidPolygon("sides intersect".into()));
        }
        let area = signed_area(&vertices);
        if area.is_nan() || area <= 0.0 {
            return Err(Error::InvalidPolygon(format!(
                "non-positive signed area {area}"
            )));
        }
        let n = vertices.len();
        for i in 0..n {
            let theta = interior_angle(
                vertices[(i + n - 1) % n],
                vertices[i],
                vertices[(i + 1) % n],
            );
            if angle_margin(theta) < ANGLE_EPS {
                return Err(Error::DegenerateVertex {
                    index: i,
                    angle: theta,
                });
            }
        }
        Ok(Self { vertices })
    }

    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn into_vertices(self) -> Vec<Point> {
        self.vertices
    }

    /// Vertex `i` with cyclic indexing; negative offsets are allowed.
    pub fn vertex(&self, i: isize) -> Point {
        let n = self.n() as isize;
        self.vertices[i.rem_euclid(n) as usize]
    }

    pub fn perimeter(&self) -> f64 {
        perimeter(&self.vertices)
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Scale-invariant isoperimetric quotient `perimeter / sqrt(area)`.
    pub fn quotient(&self) -> f64 {
        self.perimeter() / self.area().sqrt()
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (k, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[k + 1..] {
                d = d.max(a.dist(*b));
            }
        }
        d
    }

    pub fn centroid(&self) -> Point {
        let n = self.n() as f64;
        let s = self
            .vertices
            .iter()
            .fold(Point::default(), |acc, &p| acc + p);
        Point::new(s.x / n, s.y / n)
    }

    /// Applies a similarity `p -> scale * rot(angle) * p + offset`.
    pub fn transformed(&self, scale: f64, angle: f64, offset: Point) -> Result<Self> {
        Self::new(
            self.vertices
                .iter()
                .map(|&p| scale * p.rotated(angle) + offset)
                .collect(),
        )
    }

    pub fn scaled(&self, scale: f64) -> Result<Self> {
        Self::new(self.vertices.iter().map(|&p| scale * p).collect())
    }

    /// Mirror image across the y-axis, re-oriented counterclockwise.
    pub fn mirrored(&self) -> Self {
        let v = self
            .vertices
            .iter()
            .map(|p| Point::new(-p.x, p.y))
            .collect();
        Self::new(v).expect("reflection preserves validity")
    }

    /// Copy with the vertex centroid at the origin and unit perimeter.
    ///
    /// Fails only when rounding pushes a borderline angle past
    /// [`ANGLE_EPS`].
    pub fn normalized(&self) -> Result<Self> {
        let c = self.centroid();
        let s = 1.0 / self.perimeter();
        Self::from_ccw(self.vertices.iter().map(|&p| s * (p - c)).collect())
    }
}

fn check_basic(vertices: &[Point]) -> Result<()> {
    let n = vertices.len();
    if n < 3 {
        return Err(Error::InvalidPolygon(format!(
            "need at least 3 vertices, got {n}"
        )));
    }
    if let Some(k) = vertices.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidPolygon(format!("vertex {k} is not finite")));
    }
    let per = perimeter(vertices);
    for i in 0..n {
        if vertices[i].dist(vertices[(i + 1) % n]) <= LENGTH_EPS * per {
            return Err(Error::InvalidPolygon(format!("side {i} has zero length")));
        }
    }
    Ok(())
}

pub(crate) fn perimeter(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| vertices[i].dist(vertices[(i + 1) % n]))
        .sum()
}

/// Shoelace area, positive for counterclockwise order. Coordinates are taken
/// relative to the first vertex to limit cancellation.
pub(crate) fn signed_area(vertices: &[Point]) -> f64 {
    let o = vertices[0];
    let twice: f64 = vertices
        .windows(2)
        .skip(1)
        .map(|w| (w[0] - o).cross(w[1] - o))
        .sum();
    0.5 * twice
}

/// Interior angle at `cur` of a counterclockwise polygon, in `[0, 2π)`:
/// π minus the signed turning angle between the incoming and outgoing edge.
pub(crate) fn interior_angle(prev: Point, cur: Point, next: Point) -> f64 {
    // measured directly between the two sides, so sharp vertices keep full
    // relative precision
    let u = next - cur;
    let v = prev - cur;
    let theta = u.cross(v).atan2(u.dot(v));
    if theta < 0.0 {
        theta + TAU
    } else {
        theta
    }
}

/// Distance of an angle from the forbidden set {0, π, 2π}.
pub fn angle_margin_of(theta: f64) -> f64 {
    angle_margin(theta)
}

pub(crate) fn angle_margin(theta: f64) -> f64 {
    theta.min((theta - PI).abs()).min(TAU - theta)
}

/// Signed distance of `c` from the line through `a` and `b`.
fn side_of(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a) / a.dist(b)
}

fn on_segment(a: Point, b: Point, c: Point, eps: f64) -> bool {
    let d = b - a;
    let len = d.norm();
    let s = (c - a).dot(d) / len;
    s >= -eps && s <= len + eps
}

fn segments_intersect(p1: Point, p2: Point, p3: Point, p4: Point, eps: f64) -> bool {
    let d1 = side_of(p1, p2, p3);
    let d2 = side_of(p1, p2, p4);
    let d3 = side_of(p3, p4, p1);
    let d4 = side_of(p3, p4, p2);
    let strictly_opposite = |u: f64, v: f64| (u > eps && v < -eps) || (u < -eps && v > eps);
    if strictly_opposite(d1, d2) && strictly_opposite(d3, d4) {
        return true;
    }
    (d1.abs() <= eps && on_segment(p1, p2, p3, eps))
        || (d2.abs() <= eps && on_segment(p1, p2, p4, eps))
        || (d3.abs() <= eps && on_segment(p3, p4, p1, eps))
        || (d4.abs() <= eps && on_segment(p3, p4, p2, eps))
}

fn bbox_diagonal(vertices: &[Point]) -> f64 {
    let (mut lo, mut hi) = (vertices[0], vertices[0]);
    for p in vertices {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    lo.dist(hi)
}

/// True iff the closed polyline through `vertices` has no forbidden contact:
/// non-adjacent sides are disjoint and adjacent sides share only their common
/// vertex. Consecutive vertices are assumed distinct.
pub fn is_simple(vertices: &[Point]) -> bool {
    let n = vertices.len();
    if n < 3 {
        return false;
    }
    let eps = SIMPLICITY_EPS * bbox_diagonal(vertices);
    let side = |i: usize| (vertices[i], vertices[(i + 1) % n]);
    // Adjacent sides overlap only when they fold back onto each other.
    for i in 0..n {
        let (a, b) = side(i);
        let c = vertices[(i + 2) % n];
        if side_of(a, b, c).abs() <= eps && (b - a).dot(c - b) < 0.0 {
            return false;
        }
    }
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = side(i);
            let (c, d) = side(j);
            if segments_intersect(a, b, c, d, eps) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[[f64; 2]]) -> Vec<Point> {
        v.iter().map(|&p| p.into()).collect()
    }

    #[test]
    fn simple_square_and_bowtie() {
        assert!(is_simple(&pts(&[[0., 0.], [1., 0.], [1., 1.], [0., 1.]])));
        assert!(!is_simple(&pts(&[[0., 0.], [1., 1.], [1., 0.], [0., 1.]])));
    }

    #[test]
    fn collinear_midpoint_is_simple_but_rejected() {
        let v = pts(&[[0., 0.], [0.5, 0.], [1., 0.], [1., 1.], [0., 1.]]);
        assert!(is_simple(&v));
        assert!(matches!(
            Polygon::new(v),
            Err(Error::DegenerateVertex { index: 1, .. })
        ));
    }

    #[test]
    fn spike_is_not_simple() {
        let v = pts(&[[0., 0.], [2., 0.], [1., 0.], [1., 1.]]);
        assert!(!is_simple(&v));
    }

    #[test]
    fn touching_vertex_is_not_simple() {
        // vertex 4 sits on side 0
        let v = pts(&[[0., 0.], [2., 0.], [2., 2.], [1., 2.], [1., 0.], [0., 2.]]);
        assert!(!is_simple(&v));
    }

    #[test]
    fn clockwise_input_is_reversed() {
        let p = Polygon::new(pts(&[[0., 0.], [0., 1.], [1., 1.], [1., 0.]])).unwrap();
        assert_eq!(p.vertices()[0], Point::new(0., 0.));
        assert_eq!(p.vertices()[1], Point::new(1., 0.));
        assert!(p.area() > 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Polygon::new(pts(&[[0., 0.], [1., 0.]])).is_err());
        assert!(Polygon::new(pts(&[[0., 0.], [1., 0.], [1., 0.], [0., 1.]])).is_err());
        assert!(Polygon::new(pts(&[[0., 0.], [f64::NAN, 0.], [0., 1.]])).is_err());
        assert!(Polygon::new(pts(&[[0., 0.], [1., 1.], [1., 0.], [0., 1.]])).is_err());
    }

    #[test]
    fn l_shape_area() {
        let p = Polygon::new(pts(&[
            [0., 0.],
            [2., 0.],
            [2., 1.],
            [1., 1.],
            [1., 2.],
            [0., 2.],
        ]))
        .unwrap();
        assert_eq!(p.area(), 3.0);
        assert_eq!(p.perimeter(), 8.0);
    }
}
