//! Polynomial spaces on mesh elements and edges, `L2`-orthogonal projectors, and the
//! Koszul-type space `(x - x_T) P^{m-1}(T)`.

mod basis;
mod quadrature;

pub use basis::{poly_dim, poly_dim_1d, EdgeMonomials, ScaledMonomials};
pub use quadrature::{
    edge_quadrature, element_quadrature, gauss_legendre, triangle_quadrature, EdgeRule, QuadRule,
};

use crate::geometry::Point;
use crate::linalg::{lu_solve, spd_solve};
use faer::Mat;

/// Quadrature exactness used on elements for polynomial degree `k`.
pub fn element_quad_degree(k: usize) -> usize {
    2 * k + 5
}

/// Quadrature exactness used on edges for polynomial degree `k`.
pub fn edge_quad_degree(k: usize) -> usize {
    2 * k + 4
}

/// Support of a polynomial space.
#[derive(Clone, Debug)]
pub enum Carrier {
    Element {
        basis: ScaledMonomials,
        quad: QuadRule,
    },
    Edge {
        a: Point,
        b: Point,
        basis: EdgeMonomials,
        rule: EdgeRule,
    },
}

/// `P^m(X)` on an element or an edge, with its scaled monomial basis.
#[derive(Clone, Debug)]
pub struct PolySpace {
    pub degree: i32,
    pub carrier: Carrier,
}

impl PolySpace {
    /// `P^m(T)` with monomials centered at `center` and scaled by `diameter`.
    pub fn on_element(polygon: &[Point], center: Point, diameter: f64, degree: i32) -> Self {
        let quad = element_quadrature(polygon, center, (2 * degree.max(0) + 5) as usize);
        Self {
            degree,
            carrier: Carrier::Element {
                basis: ScaledMonomials::new(center, diameter, degree),
                quad,
            },
        }
    }

    /// `P^m(E)` on the segment from `a` to `b`.
    pub fn on_edge(a: Point, b: Point, degree: i32) -> Self {
        let rule = edge_quadrature(a, b, (2 * degree.max(0) + 5) as usize);
        Self {
            degree,
            carrier: Carrier::Edge {
                a,
                b,
                basis: EdgeMonomials::new(degree),
                rule,
            },
        }
    }

    pub fn dim(&self) -> usize {
        match &self.carrier {
            Carrier::Element { basis, .. } => basis.dim(),
            Carrier::Edge { basis, .. } => basis.dim(),
        }
    }

    pub fn eval(&self, p: Point) -> Vec<f64> {
        match &self.carrier {
            Carrier::Element { basis, .. } => basis.eval(p),
            Carrier::Edge { a, b, basis, .. } => basis.eval(EdgeMonomials::param(*a, *b, p)),
        }
    }

    /// Value at `p` of the polynomial with coefficients `coeffs`.
    pub fn evaluate(&self, coeffs: &[f64], p: Point) -> f64 {
        self.eval(p).iter().zip(coeffs).map(|(b, c)| b * c).sum()
    }

    fn rule(&self) -> &QuadRule {
        match &self.carrier {
            Carrier::Element { quad, .. } => quad,
            Carrier::Edge { rule, .. } => &rule.rule,
        }
    }

    /// Gram (mass) matrix of the basis.
    pub fn gram(&self) -> Mat<f64> {
        let n = self.dim();
        let mut m = Mat::zeros(n, n);
        for (p, w) in self.rule().iter() {
            let phi = self.eval(p);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += w * phi[i] * phi[j];
                }
            }
        }
        m
    }

    /// Coefficients of the `L2`-orthogonal projection of `f`.
    pub fn l2_project(&self, f: impl Fn(Point) -> f64) -> Vec<f64> {
        let n = self.dim();
        if n == 0 {
            return Vec::new();
        }
        let mut rhs = Mat::zeros(n, 1);
        for (p, w) in self.rule().iter() {
            let fv = f(p);
            for (i, phi) in self.eval(p).into_iter().enumerate() {
                rhs[(i, 0)] += w * fv * phi;
            }
        }
        let c = spd_solve(&self.gram(), &rhs);
        (0..n).map(|i| c[(i, 0)]).collect()
    }
}

/// `R^{c,m}(T) = (x - x_T) P^{m-1}(T)` with basis `(x - x_T) phi_l`.
#[derive(Clone, Debug)]
pub struct RolySpace {
    pub degree: i32,
    pub scalar: ScaledMonomials,
}

impl RolySpace {
    pub fn new(center: Point, diameter: f64, degree: i32) -> Self {
        assert!(degree >= 1);
        Self {
            degree,
            scalar: ScaledMonomials::new(center, diameter, degree - 1),
        }
    }

    pub fn dim(&self) -> usize {
        self.scalar.dim()
    }

    pub fn eval(&self, p: Point) -> Vec<Point> {
        let r = p - self.scalar.center;
        self.scalar.eval(p).into_iter().map(|q| q * r).collect()
    }

    /// Pointwise divergence `2 q + (x - x_T) . grad q` of each basis function.
    pub fn div(&self, p: Point) -> Vec<f64> {
        let r = p - self.scalar.center;
        self.scalar
            .eval(p)
            .into_iter()
            .zip(self.scalar.grad(p))
            .map(|(q, g)| 2.0 * q + r.dot(g))
            .collect()
    }

    /// Matrix of the divergence `R^{c,m}(T) -> P^{m-1}(T)` in the scaled monomial bases,
    /// computed by `L2` projection with the given element quadrature.
    pub fn divergence_matrix(&self, quad: &QuadRule) -> Mat<f64> {
        let n = self.dim();
        let mut mass = Mat::zeros(n, n);
        let mut b = Mat::zeros(n, n);
        for (p, w) in quad.iter() {
            let phi = self.scalar.eval(p);
            let dv = self.div(p);
            for i in 0..n {
                for j in 0..n {
                    mass[(i, j)] += w * phi[i] * phi[j];
                    b[(i, j)] += w * phi[i] * dv[j];
                }
            }
        }
        lu_solve(&mass, &b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::condition_number;

    fn unit_square() -> Vec<Point> {
        vec![
            Point::new(0., 0.),
            Point::new(1., 0.),
            Point::new(1., 1.),
            Point::new(0., 1.),
        ]
    }

    #[test]
    fn projection_of_x_on_constants_is_mean() {
        let sq = unit_square();
        let s = PolySpace::on_element(&sq, Point::new(0.5, 0.5), 2f64.sqrt(), 0);
        let c = s.l2_project(|p| p.x);
        assert!((c[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn projection_reproduces_members() {
        let e = PolySpace::on_edge(Point::new(0.1, 0.2), Point::new(0.7, -0.3), 1);
        let f = |p: Point| 3.0 * p.x - 2.0 * p.y + 0.5;
        let c = e.l2_project(f);
        for t in [-1.0, -0.3, 0.8] {
            let p = Point::new(0.4 + 0.3 * t, -0.05 - 0.25 * t);
            assert!((e.evaluate(&c, p) - f(p)).abs() < 1e-12);
        }
        let empty = PolySpace::on_edge(Point::new(0., 0.), Point::new(1., 0.), -1);
        assert!(empty.l2_project(f).is_empty());
    }

    #[test]
    fn divergence_matrix_examples() {
        let sq = unit_square();
        let c = Point::new(0.5, 0.5);
        let h = 2f64.sqrt();
        let quad = element_quadrature(&sq, c, 7);
        let r1 = RolySpace::new(c, h, 1);
        let d1 = r1.divergence_matrix(&quad);
        assert_eq!((d1.nrows(), d1.ncols()), (1, 1));
        assert!((d1[(0, 0)] - 2.0).abs() < 1e-13);
        let r2 = RolySpace::new(c, h, 2);
        let d2 = r2.divergence_matrix(&quad);
        assert_eq!(d2.nrows(), 3);
        assert!(condition_number(&d2) < 10.0);
        // translation of x_T leaves div of (x - x_T) unchanged
        let r1s = RolySpace::new(Point::new(0.3, 0.6), h, 1);
        assert!((r1s.divergence_matrix(&quad)[(0, 0)] - 2.0).abs() < 1e-13);
    }
}
