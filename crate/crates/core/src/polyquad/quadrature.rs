//! Gauss quadrature on segments, triangles and simple polygons.

use crate::geometry::{orient, triangulate, Point};

/// Quadrature nodes and positive weights.
#[derive(Clone, Debug, Default)]
pub struct QuadRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.points
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Edge rule from `a` to `b`, exact up to degree `degree`.
///
/// Also returns the reference coordinate `t` in [-1, 1] of every node (`a` at -1, `b` at +1).
#[derive(Clone, Debug)]
pub struct EdgeRule {
    pub rule: QuadRule,
    pub params: Vec<f64>,
}

pub fn edge_quadrature(a: Point, b: Point, degree: usize) -> EdgeRule {
    let n = (degree + 2) / 2;
    let (t, w) = gauss_legendre(n.max(1));
    let half = 0.5 * a.dist(b);
    let mid = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    let points = t.iter().map(|&s| mid + s * d).collect();
    let weights = w.iter().map(|&wi| wi * half).collect();
    EdgeRule {
        rule: QuadRule { points, weights },
        params: t,
    }
}

/// Collapsed (Duffy) Gauss rule on a triangle, exact up to degree `degree`.
pub fn triangle_quadrature(a: Point, b: Point, c: Point, degree: usize) -> QuadRule {
    let n = (degree + 3) / 2;
    let (t, w) = gauss_legendre(n);
    let area = 0.5 * orient(a, b, c).abs();
    let mut rule = QuadRule::default();
    for i in 0..n {
        let u = 0.5 * (t[i] + 1.0);
        for j in 0..n {
            let v = 0.5 * (t[j] + 1.0);
            let xi = u;
            let eta = v * (1.0 - u);
            let p = a + xi * (b - a) + eta * (c - a);
            // reference triangle has area 1/2; the Jacobian of the collapse is (1 - u)
            rule.points.push(p);
            rule.weights
                .push(2.0 * area * 0.25 * w[i] * w[j] * (1.0 - u));
        }
    }
    rule
}

/// Quadrature on a counter-clockwise simple polygon, exact up to degree `degree`.
///
/// Sub-triangles come from a fan rooted at `center` when the polygon is star-shaped with
/// respect to it, and from an ear-clipping triangulation otherwise.
pub fn element_quadrature(polygon: &[Point], center: Point, degree: usize) -> QuadRule {
    let n = polygon.len();
    let scale = crate::geometry::diameter(polygon).powi(2);
    let fan_ok = (0..n).all(|i| orient(center, polygon[i], polygon[(i + 1) % n]) > 1e-12 * scale);
    let mut rule = QuadRule::default();
    let mut push = |r: QuadRule| {
        rule.points.extend(r.points);
        rule.weights.extend(r.weights);
    };
    if fan_ok {
        for i in 0..n {
            push(triangle_quadrature(
                center,
                polygon[i],
                polygon[(i + 1) % n],
                degree,
            ));
        }
    } else {
        for t in triangulate(polygon) {
            let (a, b, c) = (polygon[t[0]], polygon[t[1]], polygon[t[2]]);
            if orient(a, b, c) > 0.0 {
                push(triangle_quadrature(a, b, c, degree));
            }
        }
    }
    rule
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exactness() {
        for n in 1..8 {
            let (x, w) = gauss_legendre(n);
            for p in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 {
                    0.0
                } else {
                    2.0 / (p as f64 + 1.0)
                };
                assert!((q - exact).abs() < 1e-14, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn edge_rule_examples() {
        let (a, b) = (Point::new(0., 0.), Point::new(1., 0.));
        let r = edge_quadrature(a, b, 3);
        assert_eq!(r.rule.len(), 2);
        assert!((r.rule.integrate(|_| 1.0) - 1.0).abs() < 1e-15);
        assert!((r.rule.integrate(|p| p.x.powi(3)) - 0.25).abs() < 1e-15);
        // nodes symmetric about the midpoint
        assert!((r.rule.points[0].x + r.rule.points[1].x - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unit_square_monomial() {
        let sq = [
            Point::new(0., 0.),
            Point::new(1., 0.),
            Point::new(1., 1.),
            Point::new(0., 1.),
        ];
        let r = element_quadrature(&sq, Point::new(0.5, 0.5), 3);
        assert!((r.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
        assert!((r.integrate(|p| p.x * p.x * p.y) - 1.0 / 6.0).abs() < 1e-14);
        assert!(r.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn cut_quadrilateral_area() {
        let q = [
            Point::new(0.5, 0.),
            Point::new(1., 0.),
            Point::new(0., 1.),
            Point::new(0., 0.5),
        ];
        let c = crate::geometry::interior_point(&q);
        let r = element_quadrature(&q, c, 5);
        assert!((r.integrate(|_| 1.0) - 0.375).abs() < 1e-14);
    }
}
