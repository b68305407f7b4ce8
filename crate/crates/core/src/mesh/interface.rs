//! Closed interface curves and their polygonal discretization.

use crate::error::{Error, Result};
use crate::geometry::{is_simple, winding_number, BoundingBox, Point};
use std::f64::consts::PI;

/// A closed polygonal chain; the last vertex connects back to the first.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonalChain {
    pub vertices: Vec<Point>,
}

impl PolygonalChain {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidInput(
                "a closed chain needs at least 3 vertices".into(),
            ));
        }
        if !is_simple(&vertices) {
            return Err(Error::InvalidInput("chain is self-intersecting".into()));
        }
        Ok(Self { vertices })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn length(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).sum()
    }

    /// Points with nonzero winding number are interior.
    pub fn contains(&self, p: Point) -> bool {
        winding_number(&self.vertices, p) != 0
    }

    /// True if every vertex lies strictly inside `domain` (by more than `tol`).
    pub fn inside(&self, domain: &BoundingBox, tol: f64) -> bool {
        self.vertices
            .iter()
            .all(|&p| domain.contains_strictly(p, tol))
    }
}

/// A closed, non-self-intersecting curve.
pub trait ParametricCurve {
    /// Point at parameter `s` in `[0, 1)`.
    fn point(&self, s: f64) -> Point;

    /// Curve length (numerical by default).
    fn perimeter(&self) -> f64 {
        let n = 4096;
        (0..n)
            .map(|i| {
                self.point(i as f64 / n as f64)
                    .dist(self.point((i + 1) as f64 / n as f64))
            })
            .sum()
    }

    /// `n` points at uniform parameter spacing.
    fn sample(&self, n: usize) -> Vec<Point> {
        (0..n).map(|i| self.point(i as f64 / n as f64)).collect()
    }

    /// Sign-definite membership test for the exact region enclosed by the curve.
    fn contains(&self, p: Point) -> bool;
}

#[derive(Clone, Copy, Debug)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl ParametricCurve for Circle {
    fn point(&self, s: f64) -> Point {
        let th = 2.0 * PI * s;
        self.center + Point::new(self.radius * th.cos(), self.radius * th.sin())
    }

    fn perimeter(&self) -> f64 {
        2.0 * PI * self.radius
    }

    fn contains(&self, p: Point) -> bool {
        p.dist(self.center) < self.radius
    }
}

/// Star-shaped curve `rho(theta) = R (1 + amplitude cos(lobes theta))`.
#[derive(Clone, Copy, Debug)]
pub struct DeformedCircle {
    pub center: Point,
    pub radius: f64,
    pub amplitude: f64,
    pub lobes: u32,
}

impl DeformedCircle {
    pub fn rho(&self, theta: f64) -> f64 {
        self.radius * (1.0 + self.amplitude * (self.lobes as f64 * theta).cos())
    }
}

impl ParametricCurve for DeformedCircle {
    fn point(&self, s: f64) -> Point {
        let th = 2.0 * PI * s;
        let r = self.rho(th);
        self.center + Point::new(r * th.cos(), r * th.sin())
    }

    fn contains(&self, p: Point) -> bool {
        let d = p - self.center;
        d.norm() < self.rho(d.y.atan2(d.x))
    }
}

/// Boundary of the axis-aligned square `center + [-half, half]^2`.
#[derive(Clone, Copy, Debug)]
pub struct SquareLoop {
    pub center: Point,
    pub half: f64,
}

impl ParametricCurve for SquareLoop {
    fn point(&self, s: f64) -> Point {
        let s = s.rem_euclid(1.0) * 4.0;
        let side = s.floor() as usize;
        let f = s - side as f64;
        let h = self.half;
        let corners = [
            Point::new(-h, -h),
            Point::new(h, -h),
            Point::new(h, h),
            Point::new(-h, h),
        ];
        let a = corners[side % 4];
        let b = corners[(side + 1) % 4];
        self.center + a + f * (b - a)
    }

    fn perimeter(&self) -> f64 {
        8.0 * self.half
    }

    /// Corners plus equally spaced points on each side; `n` is rounded up to a multiple of 4.
    fn sample(&self, n: usize) -> Vec<Point> {
        let per_side = n.div_ceil(4).max(1);
        let total = 4 * per_side;
        (0..total)
            .map(|i| self.point(i as f64 / total as f64))
            .collect()
    }

    fn contains(&self, p: Point) -> bool {
        let d = p - self.center;
        d.x.abs() < self.half && d.y.abs() < self.half
    }
}

/// Polygonal approximation of `curve` with segments of length about `h_background / 2^M`.
///
/// The segment count is `ceil(perimeter / h_background) * 2^M`, so increasing `M` by one
/// doubles it exactly.
pub fn discretize_interface(
    curve: &dyn ParametricCurve,
    refinement_ratio: u32,
    h_background: f64,
) -> Result<PolygonalChain> {
    if !(h_background > 0.0) {
        return Err(Error::InvalidInput(
            "background size must be positive".into(),
        ));
    }
    let base = ((curve.perimeter() / h_background) - 1e-9).ceil().max(3.0) as usize;
    let n = base << refinement_ratio;
    PolygonalChain::new(curve.sample(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn octagon_from_circle() {
        let c = Circle {
            center: Point::default(),
            radius: 0.25,
        };
        let chain = discretize_interface(&c, 0, c.perimeter() / 8.0).unwrap();
        assert_eq!(chain.len(), 8);
        for p in &chain.vertices {
            assert!((p.norm() - 0.25).abs() < 1e-15);
        }
        let side = chain.vertices[0].dist(chain.vertices[1]);
        for (a, b) in chain.segments() {
            assert!((a.dist(b) - side).abs() < 1e-14);
        }
    }

    #[test]
    fn refinement_ratio_doubles_segments() {
        let c = Circle {
            center: Point::default(),
            radius: 0.25,
        };
        let n0 = discretize_interface(&c, 1, 0.1).unwrap().len();
        let n1 = discretize_interface(&c, 2, 0.1).unwrap().len();
        assert_eq!(n1, 2 * n0);
    }

    #[test]
    fn square_chain_lies_on_square() {
        let s = SquareLoop {
            center: Point::default(),
            half: 0.25,
        };
        let chain = discretize_interface(&s, 0, 0.125).unwrap();
        assert_eq!(chain.len(), 16);
        for c in [(-0.25, -0.25), (0.25, -0.25), (0.25, 0.25), (-0.25, 0.25)] {
            assert!(chain
                .vertices
                .iter()
                .any(|p| p.dist(Point::new(c.0, c.1)) < 1e-15));
        }
        for p in &chain.vertices {
            assert!((p.x.abs().max(p.y.abs()) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn deformed_circle_is_simple() {
        let d = DeformedCircle {
            center: Point::default(),
            radius: 0.25,
            amplitude: 0.2,
            lobes: 3,
        };
        let chain = discretize_interface(&d, 2, 0.05).unwrap();
        assert!(chain.inside(&BoundingBox::unit_centered(), 0.1));
    }
}
