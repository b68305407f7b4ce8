//! Scaled monomial bases on elements and edges.

use crate::geometry::Point;

/// Dimension of the full polynomial space of total degree `m` in two variables (0 for `m < 0`).
pub fn poly_dim(m: i32) -> usize {
    if m < 0 {
        0
    } else {
        let m = m as usize;
        (m + 1) * (m + 2) / 2
    }
}

/// Dimension of polynomials of degree `m` on a segment (0 for `m < 0`).
pub fn poly_dim_1d(m: i32) -> usize {
    if m < 0 {
        0
    } else {
        m as usize + 1
    }
}

/// Monomials `((x - c) / h)^a ((y - c) / h)^b`, `a + b <= degree`, ordered by total degree.
#[derive(Clone, Debug)]
pub struct ScaledMonomials {
    pub center: Point,
    pub scale: f64,
    pub degree: i32,
    powers: Vec<(i32, i32)>,
}

impl ScaledMonomials {
    pub fn new(center: Point, scale: f64, degree: i32) -> Self {
        let mut powers = Vec::with_capacity(poly_dim(degree));
        for d in 0..=degree {
            for b in 0..=d {
                powers.push((d - b, b));
            }
        }
        Self {
            center,
            scale,
            degree,
            powers,
        }
    }

    pub fn dim(&self) -> usize {
        self.powers.len()
    }

    /// Exponents of the `i`-th monomial.
    pub fn powers(&self, i: usize) -> (i32, i32) {
        self.powers[i]
    }

    /// Total degree of the `i`-th monomial.
    pub fn degree_of(&self, i: usize) -> i32 {
        let (a, b) = self.powers[i];
        a + b
    }

    fn local(&self, p: Point) -> (f64, f64) {
        (
            (p.x - self.center.x) / self.scale,
            (p.y - self.center.y) / self.scale,
        )
    }

    pub fn eval(&self, p: Point) -> Vec<f64> {
        let (xi, eta) = self.local(p);
        self.powers
            .iter()
            .map(|&(a, b)| xi.powi(a) * eta.powi(b))
            .collect()
    }

    pub fn grad(&self, p: Point) -> Vec<Point> {
        let (xi, eta) = self.local(p);
        let h = self.scale;
        self.powers
            .iter()
            .map(|&(a, b)| {
                let gx = if a > 0 {
                    a as f64 * xi.powi(a - 1) * eta.powi(b) / h
                } else {
                    0.0
                };
                let gy = if b > 0 {
                    b as f64 * xi.powi(a) * eta.powi(b - 1) / h
                } else {
                    0.0
                };
                Point::new(gx, gy)
            })
            .collect()
    }
}

/// Monomials `t^j`, `j <= degree`, in the reference coordinate `t` in [-1, 1] of an edge.
#[derive(Clone, Copy, Debug)]
pub struct EdgeMonomials {
    pub degree: i32,
}

impl EdgeMonomials {
    pub fn new(degree: i32) -> Self {
        Self { degree }
    }

    pub fn dim(&self) -> usize {
        poly_dim_1d(self.degree)
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        (0..self.dim()).map(|j| t.powi(j as i32)).collect()
    }

    /// Reference coordinate of `p` on the segment from `a` to `b`.
    pub fn param(a: Point, b: Point, p: Point) -> f64 {
        let d = b - a;
        2.0 * (p - a).dot(d) / d.dot(d) - 1.0
    }
}
