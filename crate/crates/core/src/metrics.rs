use serde::Serialize;

use crate::error::{Error, Result};
use crate::point::Point;
use crate::polygon::{angle_margin, interior_angle, Polygon, ANGLE_EPS};

/// Derived per-side, per-vertex and global quantities of a polygon.
///
/// Side `i` joins vertex `i` to vertex `i + 1`. The diagonal angles of vertex
/// `i` are measured against the diagonal joining its two neighbours:
/// `diag_angle_minus[i]` at vertex `i - 1` (towards vertex `i`) and
/// `diag_angle_plus[i]` at vertex `i + 1` (towards vertex `i`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolygonMetrics {
    pub side_length: Vec<f64>,
    pub outward_normal: Vec<Point>,
    pub midpoint: Vec<Point>,
    pub interior_angle: Vec<f64>,
    pub diag_angle_minus: Vec<f64>,
    pub diag_angle_plus: Vec<f64>,
    pub perimeter: f64,
    pub area: f64,
    pub quotient: f64,
}

impl PolygonMetrics {
    pub fn n(&self) -> usize {
        self.side_length.len()
    }

    /// Interior angle with cyclic indexing.
    pub fn theta(&self, i: usize) -> f64 {
        self.interior_angle[i % self.n()]
    }

    /// Sum of exterior angles `Σ (π - θ_i)`; 2π for every valid polygon.
    pub fn turning_sum(&self) -> f64 {
        self.interior_angle
            .iter()
            .map(|t| std::f64::consts::PI - t)
            .sum()
    }
}

/// Unsigned angle between two vectors, in `[0, π]`.
fn angle_between(a: Point, b: Point) -> f64 {
    a.cross(b).abs().atan2(a.dot(b))
}

pub fn compute_metrics(p: &Polygon) -> Result<PolygonMetrics> {
    let n = p.n();
    let v = |i: usize| p.vertex(i as isize);
    let mut m = PolygonMetrics {
        side_length: Vec::with_capacity(n),
        outward_normal: Vec::with_capacity(n),
        midpoint: Vec::with_capacity(n),
        interior_angle: Vec::with_capacity(n),
        diag_angle_minus: Vec::with_capacity(n),
        diag_angle_plus: Vec::with_capacity(n),
        perimeter: 0.0,
        area: p.area(),
        quotient: 0.0,
    };
    for i in 0..n {
        let (a, b) = (v(i), v(i + 1));
        let d = b - a;
        let len = d.norm();
        m.side_length.push(len);
        m.outward_normal.push((1.0 / len * d).right_perp());
        m.midpoint.push(a.midpoint(b));

        let prev = v(i + n - 1);
        let theta = interior_angle(prev, a, b);
        if angle_margin(theta) < ANGLE_EPS {
            return Err(Error::DegenerateVertex {
                index: i,
                angle: theta,
            });
        }
        m.interior_angle.push(theta);
        m.diag_angle_minus.push(angle_between(b - prev, a - prev));
        m.diag_angle_plus.push(angle_between(prev - b, a - b));
    }
    m.perimeter = m.side_length.iter().sum();
    m.quotient = m.perimeter / m.area.sqrt();
    Ok(m)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use approx::assert_abs_diff_eq;

    use super::*;

    fn poly(v: &[[f64; 2]]) -> Polygon {
        Polygon::new(v.iter().map(|&p| p.into()).collect()).unwrap()
    }

    #[test]
    fn unit_square() {
        let m = compute_metrics(&poly(&[[0., 0.], [1., 0.], [1., 1.], [0., 1.]])).unwrap();
        for i in 0..4 {
            assert_eq!(m.side_length[i], 1.0);
            assert_abs_diff_eq!(m.interior_angle[i], FRAC_PI_2, epsilon = 1e-15);
        }
        assert_eq!((m.perimeter, m.area, m.quotient), (4.0, 1.0, 4.0));
        assert_eq!(m.outward_normal[0], Point::new(0., -1.));
        assert_eq!(m.midpoint[0], Point::new(0.5, 0.));
    }

    #[test]
    fn right_triangle_diagonal_angles() {
        let m = compute_metrics(&poly(&[[0., 0.], [4., 0.], [0., 3.]])).unwrap();
        assert_eq!(m.side_length, vec![4., 5., 3.]);
        assert_eq!((m.area, m.perimeter), (6.0, 12.0));
        // vertex 2 is the apex (0, 3); neighbours are (4, 0) and (0, 0)
        assert_abs_diff_eq!(m.diag_angle_minus[2].cos(), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(m.diag_angle_plus[2].cos(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn l_shape_has_one_reflex_vertex() {
        let m = compute_metrics(&poly(&[
            [0., 0.],
            [2., 0.],
            [2., 1.],
            [1., 1.],
            [1., 2.],
            [0., 2.],
        ]))
        .unwrap();
        let reflex: Vec<usize> = (0..6).filter(|&i| m.interior_angle[i] > PI).collect();
        assert_eq!(reflex, vec![3]);
        assert_abs_diff_eq!(m.interior_angle[3], 1.5 * PI, epsilon = 1e-15);
        assert_eq!(m.area, 3.0);
        assert_abs_diff_eq!(m.turning_sum(), 2.0 * PI, epsilon = 1e-14);
    }
}
