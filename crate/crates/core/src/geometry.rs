//! Planar geometric primitives: points, polygon measures and predicates.

use std::ops::{Add, Mul, Sub};

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Self) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, other: Self) -> f64 {
        (self - other).norm()
    }

    /// Rotation by -90 degrees: the right-hand normal of a direction.
    pub fn rot_cw(self) -> Self {
        Self::new(self.y, -self.x)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<Point> for f64 {
    type Output = Point;
    fn mul(self, p: Point) -> Point {
        Point::new(self * p.x, self * p.y)
    }
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn unit_centered() -> Self {
        Self::new(Point::new(-0.5, -0.5), Point::new(0.5, 0.5))
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn of_points(points: &[Point]) -> Self {
        let mut b = Self::new(
            Point::new(f64::INFINITY, f64::INFINITY),
            Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in points {
            b.min.x = b.min.x.min(p.x);
            b.min.y = b.min.y.min(p.y);
            b.max.x = b.max.x.max(p.x);
            b.max.y = b.max.y.max(p.y);
        }
        b
    }

    /// True if `p` lies on the boundary within `tol`.
    pub fn on_boundary(&self, p: Point, tol: f64) -> bool {
        (p.x - self.min.x).abs() <= tol
            || (p.x - self.max.x).abs() <= tol
            || (p.y - self.min.y).abs() <= tol
            || (p.y - self.max.y).abs() <= tol
    }

    pub fn contains_strictly(&self, p: Point, tol: f64) -> bool {
        p.x > self.min.x + tol
            && p.x < self.max.x - tol
            && p.y > self.min.y + tol
            && p.y < self.max.y - tol
    }
}

/// Twice the signed area of the triangle (a, b, c); positive when counter-clockwise.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Signed area (shoelace formula); positive for counter-clockwise loops.
pub fn signed_area(poly: &[Point]) -> f64 {
    let Some(&o) = poly.first() else { return 0.0 };
    let mut s = 0.0;
    for w in poly[1..].windows(2) {
        s += (w[0] - o).cross(w[1] - o);
    }
    0.5 * s
}

/// Area centroid of a simple polygon.
pub fn centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let (mut cx, mut cy, mut a) = (0.0, 0.0, 0.0);
    // shift for conditioning
    let o = poly[0];
    for i in 0..n {
        let p = poly[i] - o;
        let q = poly[(i + 1) % n] - o;
        let c = p.cross(q);
        a += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    Point::new(o.x + cx / (3.0 * a), o.y + cy / (3.0 * a))
}

/// Largest distance between two vertices.
pub fn diameter(poly: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..poly.len() {
        for j in i + 1..poly.len() {
            d = d.max(poly[i].dist(poly[j]));
        }
    }
    d
}

/// Winding number of the closed loop `poly` around `p`.
pub fn winding_number(poly: &[Point], p: Point) -> i32 {
    let n = poly.len();
    let mut w = 0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        if a.y <= p.y {
            if b.y > p.y && orient(a, b, p) > 0.0 {
                w += 1;
            }
        } else if b.y <= p.y && orient(a, b, p) < 0.0 {
            w -= 1;
        }
    }
    w
}

/// Distance from `p` to the segment [a, b].
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let l2 = d.dot(d);
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    p.dist(a + t * d)
}

/// True if `p` lies inside the polygon and at least `margin` away from its boundary.
pub fn strictly_inside(poly: &[Point], p: Point, margin: f64) -> bool {
    if winding_number(poly, p) == 0 {
        return false;
    }
    let n = poly.len();
    (0..n).all(|i| point_segment_distance(p, poly[i], poly[(i + 1) % n]) > margin)
}

/// Proper or touching intersection test between two closed segments.
fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    let on = |p: Point, q: Point, r: Point, o: f64| {
        o == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(a, b, c, o1) || on(a, b, d, o2) || on(c, d, a, o3) || on(c, d, b, o4)
}

/// True if no two non-adjacent sides of the closed loop intersect.
pub fn is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Ear-clipping triangulation of a counter-clockwise simple polygon.
///
/// Collinear (180 degree) vertices are allowed. Returns index triples into `poly`.
pub fn triangulate(poly: &[Point]) -> Vec<[usize; 3]> {
    let mut idx: Vec<usize> = (0..poly.len()).collect();
    let mut tris = Vec::with_capacity(poly.len().saturating_sub(2));
    let scale = diameter(poly).powi(2);
    let eps = 1e-14 * scale;
    while idx.len() > 3 {
        let m = idx.len();
        let mut best: Option<(usize, f64)> = None;
        for i in 0..m {
            let (ip, ic, inx) = (idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]);
            let (a, b, c) = (poly[ip], poly[ic], poly[inx]);
            let o = orient(a, b, c);
            if o <= eps {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                if j == ip || j == ic || j == inx {
                    return false;
                }
                let p = poly[j];
                orient(a, b, p) >= -eps && orient(b, c, p) >= -eps && orient(c, a, p) >= -eps
            });
            if blocked {
                continue;
            }
            // prefer well-shaped ears
            let q = o / ((b - a).dot(b - a) + (c - b).dot(c - b) + (a - c).dot(a - c));
            if best.is_none_or(|(_, bq)| q > bq) {
                best = Some((i, q));
            }
        }
        let Some((i, _)) = best else {
            // degenerate input; fall back to a fan
            for w in 1..idx.len() - 1 {
                tris.push([idx[0], idx[w], idx[w + 1]]);
            }
            return tris;
        };
        tris.push([idx[(i + m - 1) % m], idx[i], idx[(i + 1) % m]]);
        idx.remove(i);
    }
    tris.push([idx[0], idx[1], idx[2]]);
    tris
}

/// A point strictly inside the polygon at a distance from its boundary comparable to its size.
///
/// The area centroid is used when it is strictly inside; otherwise the centroid of the
/// largest triangle of an ear-clipping triangulation.
pub fn interior_point(poly: &[Point]) -> Point {
    let c = centroid(poly);
    let margin = 1e-3 * diameter(poly);
    if strictly_inside(poly, c, margin) {
        return c;
    }
    let tris = triangulate(poly);
    let (mut best, mut best_area) = (c, f64::NEG_INFINITY);
    for t in tris {
        let (a, b, d) = (poly[t[0]], poly[t[1]], poly[t[2]]);
        let area = 0.5 * orient(a, b, d);
        if area > best_area {
            best_area = area;
            best = Point::new((a.x + b.x + d.x) / 3.0, (a.y + b.y + d.y) / 3.0);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point> {
        vec![
            Point::new(0., 0.),
            Point::new(1., 0.),
            Point::new(1., 1.),
            Point::new(0., 1.),
        ]
    }

    #[test]
    fn shoelace_and_centroid() {
        let s = square();
        assert_eq!(signed_area(&s), 1.0);
        let c = centroid(&s);
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 0.5).abs() < 1e-15);
        let mut r = s.clone();
        r.reverse();
        assert_eq!(signed_area(&r), -1.0);
    }

    #[test]
    fn winding() {
        let s = square();
        assert_eq!(winding_number(&s, Point::new(0.5, 0.5)), 1);
        assert_eq!(winding_number(&s, Point::new(1.5, 0.5)), 0);
        let mut r = s.clone();
        r.reverse();
        assert_eq!(winding_number(&r, Point::new(0.5, 0.5)), -1);
    }

    #[test]
    fn simple_polygon_check() {
        assert!(is_simple(&square()));
        let bow = vec![
            Point::new(0., 0.),
            Point::new(1., 1.),
            Point::new(1., 0.),
            Point::new(0., 1.),
        ];
        assert!(!is_simple(&bow));
    }

    #[test]
    fn triangulate_nonconvex_with_collinear() {
        // L-shape with a hanging vertex on the bottom side
        let p = vec![
            Point::new(0., 0.),
            Point::new(1., 0.),
            Point::new(2., 0.),
            Point::new(2., 1.),
            Point::new(1., 1.),
            Point::new(1., 2.),
            Point::new(0., 2.),
        ];
        let tris = triangulate(&p);
        assert_eq!(tris.len(), p.len() - 2);
        let total: f64 = tris
            .iter()
            .map(|t| 0.5 * orient(p[t[0]], p[t[1]], p[t[2]]))
            .sum();
        assert!((total - 3.0).abs() < 1e-14);
        assert!(tris.iter().all(|t| orient(p[t[0]], p[t[1]], p[t[2]]) > 0.0));
    }

    #[test]
    fn interior_point_of_nonconvex() {
        // thin C-shape whose centroid falls outside
        let p = vec![
            Point::new(0., 0.),
            Point::new(3., 0.),
            Point::new(3., 0.2),
            Point::new(0.2, 0.2),
            Point::new(0.2, 2.8),
            Point::new(3., 2.8),
            Point::new(3., 3.),
            Point::new(0., 3.),
        ];
        let c = centroid(&p);
        assert_eq!(winding_number(&p, c), 0);
        let x = interior_point(&p);
        assert!(strictly_inside(&p, x, 0.0));
    }
}
