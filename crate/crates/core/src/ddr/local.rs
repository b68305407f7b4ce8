//! Local reconstructions on each element: edge potentials, discrete gradient, potential, and
//! the boundary differences used by the stabilization.

use super::dofs::DofMap;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::linalg::{condition_number, dot, lu_solve, spd_solve};
use crate::mesh::FittedMesh;
use crate::polyquad::{
    edge_quad_degree, edge_quadrature, element_quad_degree, element_quadrature, poly_dim, EdgeRule,
    QuadRule, RolySpace, ScaledMonomials,
};
use faer::Mat;
use rayon::prelude::*;

/// Largest admissible condition number of a local system.
pub const MAX_LOCAL_CONDITION: f64 = 1e12;

/// Reconstruction operators of one element, acting on its local unknowns.
///
/// Edge polynomials use the monomials `t^j` of the reference coordinate `t in [-1, 1]` along
/// the edge orientation `vertices[0] -> vertices[1]`. Element polynomials use the scaled
/// monomials of degree `k + 1` centered at `x_T`, whose first `dim P^k` members span `P^k`.
#[derive(Clone, Debug)]
pub struct ElementOperators {
    pub k: usize,
    pub n_local: usize,
    pub h: f64,
    pub basis: ScaledMonomials,
    pub quad: QuadRule,
    /// Per local edge: quadrature rule along the edge orientation.
    pub edge_rules: Vec<EdgeRule>,
    /// Per local edge: `(k + 2) x n_local` map to the coefficients of `v_TE`.
    pub edge_potentials: Vec<Mat<f64>>,
    /// `2 dim P^k x n_local`: x-components then y-components of `G_T`.
    pub gradient: Mat<f64>,
    /// `dim P^{k+1} x n_local` map to the coefficients of `p_T`.
    pub potential: Mat<f64>,
    /// Per local edge: `(k + 2) x n_local` map to the coefficients of `p_T|_E - v_TE`.
    pub stabilization: Vec<Mat<f64>>,
    /// Local energy matrix `G^T M G + h_T^{-1} sum_E S_E^T M_E S_E` (without `sigma_T`).
    pub energy: Mat<f64>,
}

fn mat_rows_combination(m: &Mat<f64>, weights: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m.ncols()];
    for (i, &w) in weights.iter().enumerate() {
        if w != 0.0 {
            for (j, o) in out.iter_mut().enumerate() {
                *o += w * m[(i, j)];
            }
        }
    }
    out
}

fn powers(t: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| t.powi(j as i32)).collect()
}

/// `int_{-1}^{1} t^p dt`.
fn ref_moment(p: usize) -> f64 {
    if p % 2 == 1 {
        0.0
    } else {
        2.0 / (p as f64 + 1.0)
    }
}

impl ElementOperators {
    pub fn build(mesh: &FittedMesh, t: usize, k: usize) -> Result<Self> {
        let el = &mesh.elements[t];
        let poly = mesh.element_polygon(t);
        let nv = el.vertices.len();
        let dk = poly_dim(k as i32);
        let dk1 = poly_dim(k as i32 + 1);
        let dkm = poly_dim(k as i32 - 1);
        let n_local = nv + nv * k + dkm;
        let h = el.diameter;
        let basis = ScaledMonomials::new(el.center, h, k as i32 + 1);
        let quad = element_quadrature(&poly, el.center, element_quad_degree(k));
        let elem_dof = |m: usize| nv + nv * k + m;

        // edge potentials
        let ne1 = k + 2;
        let mut sys = Mat::<f64>::zeros(ne1, ne1);
        for j in 0..ne1 {
            sys[(0, j)] = if j % 2 == 0 { 1.0 } else { -1.0 };
            sys[(1, j)] = 1.0;
            for l in 0..k {
                sys[(2 + l, j)] = ref_moment(j + l);
            }
        }
        let cond = condition_number(&sys);
        if cond > MAX_LOCAL_CONDITION {
            return Err(Error::IllConditioned {
                element: t,
                condition: cond,
            });
        }
        let mut edge_rules = Vec::with_capacity(nv);
        let mut edge_potentials = Vec::with_capacity(nv);
        for i in 0..nv {
            let e = el.edges[i];
            let (a, b) = mesh.edge_endpoints(e);
            edge_rules.push(edge_quadrature(a, b, edge_quad_degree(k)));
            let (la, lb) = if el.orientations[i] > 0.0 {
                (i, (i + 1) % nv)
            } else {
                ((i + 1) % nv, i)
            };
            let mut rhs = Mat::<f64>::zeros(ne1, n_local);
            rhs[(0, la)] = 1.0;
            rhs[(1, lb)] = 1.0;
            for l in 0..k {
                for m in 0..k {
                    rhs[(2 + l, nv + i * k + m)] = ref_moment(m + l);
                }
            }
            edge_potentials.push(lu_solve(&sys, &rhs));
        }

        // gradient
        let mut mass_k = Mat::<f64>::zeros(dk, dk);
        let mut bg = Mat::<f64>::zeros(2 * dk, n_local);
        for (p, w) in quad.iter() {
            let phi = basis.eval(p);
            let grad = basis.grad(p);
            for i in 0..dk {
                for j in 0..dk {
                    mass_k[(i, j)] += w * phi[i] * phi[j];
                }
                for m in 0..dkm {
                    bg[(i, elem_dof(m))] -= w * phi[m] * grad[i].x;
                    bg[(dk + i, elem_dof(m))] -= w * phi[m] * grad[i].y;
                }
            }
        }
        for i in 0..nv {
            let n = mesh.edges[el.edges[i]].normal;
            let om = el.orientations[i];
            let rule = &edge_rules[i];
            for (q, (p, w)) in rule.rule.iter().enumerate() {
                let vte = mat_rows_combination(&edge_potentials[i], &powers(rule.params[q], ne1));
                let phi = basis.eval(p);
                for a in 0..dk {
                    let cx = om * w * phi[a] * n.x;
                    let cy = om * w * phi[a] * n.y;
                    for (j, &v) in vte.iter().enumerate() {
                        bg[(a, j)] += cx * v;
                        bg[(dk + a, j)] += cy * v;
                    }
                }
            }
        }
        let cond = condition_number(&mass_k);
        if cond > MAX_LOCAL_CONDITION {
            return Err(Error::IllConditioned {
                element: t,
                condition: cond,
            });
        }
        let mut gradient = Mat::<f64>::zeros(2 * dk, n_local);
        let gx = spd_solve(&mass_k, &bg.subrows(0, dk).to_owned());
        let gy = spd_solve(&mass_k, &bg.subrows(dk, dk).to_owned());
        for i in 0..dk {
            for j in 0..n_local {
                gradient[(i, j)] = gx[(i, j)];
                gradient[(dk + i, j)] = gy[(i, j)];
            }
        }

        // potential, tested against (x - x_T) P^{k+1}(T)
        let roly = RolySpace::new(el.center, h, k as i32 + 2);
        let mut amat = Mat::<f64>::zeros(dk1, dk1);
        let mut bp = Mat::<f64>::zeros(dk1, n_local);
        for (p, w) in quad.iter() {
            let phi = basis.eval(p);
            let div = roly.div(p);
            let tau = roly.eval(p);
            for l in 0..dk1 {
                for j in 0..dk1 {
                    amat[(l, j)] += w * phi[j] * div[l];
                }
            }
            // G(p) as rows over local unknowns
            let gxr = mat_rows_combination(&gradient.subrows(0, dk).to_owned(), &phi[..dk]);
            let gyr = mat_rows_combination(&gradient.subrows(dk, dk).to_owned(), &phi[..dk]);
            for l in 0..dk1 {
                for j in 0..n_local {
                    bp[(l, j)] -= w * (gxr[j] * tau[l].x + gyr[j] * tau[l].y);
                }
            }
        }
        for i in 0..nv {
            let n = mesh.edges[el.edges[i]].normal;
            let om = el.orientations[i];
            let rule = &edge_rules[i];
            for (q, (p, w)) in rule.rule.iter().enumerate() {
                let vte = mat_rows_combination(&edge_potentials[i], &powers(rule.params[q], ne1));
                let tau = roly.eval(p);
                for l in 0..dk1 {
                    let c = om * w * tau[l].dot(n);
                    for (j, &v) in vte.iter().enumerate() {
                        bp[(l, j)] += c * v;
                    }
                }
            }
        }
        let cond = condition_number(&amat);
        if cond > MAX_LOCAL_CONDITION {
            return Err(Error::IllConditioned {
                element: t,
                condition: cond,
            });
        }
        let potential = lu_solve(&amat, &bp);

        // stabilization differences and local energy matrix
        let mut energy = Mat::<f64>::zeros(n_local, n_local);
        for i in 0..dk {
            for j in 0..dk {
                let m = mass_k[(i, j)];
                if m == 0.0 {
                    continue;
                }
                for a in 0..n_local {
                    let gxa = gradient[(i, a)];
                    let gya = gradient[(dk + i, a)];
                    for b in 0..n_local {
                        energy[(a, b)] +=
                            m * (gxa * gradient[(j, b)] + gya * gradient[(dk + j, b)]);
                    }
                }
            }
        }
        let mut stabilization = Vec::with_capacity(nv);
        for i in 0..nv {
            let rule = &edge_rules[i];
            let mut me = Mat::<f64>::zeros(ne1, ne1);
            let mut rhs = Mat::<f64>::zeros(ne1, n_local);
            for (q, (p, w)) in rule.rule.iter().enumerate() {
                let tp = powers(rule.params[q], ne1);
                let pv = mat_rows_combination(&potential, &basis.eval(p));
                let vte = mat_rows_combination(&edge_potentials[i], &tp);
                let diff: Vec<f64> = pv.iter().zip(&vte).map(|(a, b)| a - b).collect();
                for a in 0..ne1 {
                    for b in 0..ne1 {
                        me[(a, b)] += w * tp[a] * tp[b];
                    }
                    for (j, d) in diff.iter().enumerate() {
                        rhs[(a, j)] += w * tp[a] * d;
                    }
                }
                for a in 0..n_local {
                    let c = w * diff[a] / h;
                    if c == 0.0 {
                        continue;
                    }
                    for b in 0..n_local {
                        energy[(a, b)] += c * diff[b];
                    }
                }
            }
            stabilization.push(spd_solve(&me, &rhs));
        }

        Ok(Self {
            k,
            n_local,
            h,
            basis,
            quad,
            edge_rules,
            edge_potentials,
            gradient,
            potential,
            stabilization,
            energy,
        })
    }

    pub fn dim_k(&self) -> usize {
        poly_dim(self.k as i32)
    }

    /// Rows over local unknowns giving the two components of `G_T` at `x`.
    pub fn gradient_rows(&self, x: Point) -> (Vec<f64>, Vec<f64>) {
        let dk = self.dim_k();
        let phi = self.basis.eval(x);
        let mut gx = vec![0.0; self.n_local];
        let mut gy = vec![0.0; self.n_local];
        for (i, &p) in phi.iter().enumerate().take(dk) {
            for j in 0..self.n_local {
                gx[j] += p * self.gradient[(i, j)];
                gy[j] += p * self.gradient[(dk + i, j)];
            }
        }
        (gx, gy)
    }

    /// Row over local unknowns giving `p_T` at `x`.
    pub fn potential_row(&self, x: Point) -> Vec<f64> {
        mat_rows_combination(&self.potential, &self.basis.eval(x))
    }

    /// Row over local unknowns giving `v_TE` at reference coordinate `t` of local edge `i`.
    pub fn edge_potential_row(&self, i: usize, t: f64) -> Vec<f64> {
        mat_rows_combination(&self.edge_potentials[i], &powers(t, self.k + 2))
    }

    pub fn gradient_at(&self, local: &[f64], x: Point) -> Point {
        let (gx, gy) = self.gradient_rows(x);
        Point::new(dot(&gx, local), dot(&gy, local))
    }

    pub fn potential_at(&self, local: &[f64], x: Point) -> f64 {
        dot(&self.potential_row(x), local)
    }

    pub fn edge_potential_at(&self, i: usize, local: &[f64], t: f64) -> f64 {
        dot(&self.edge_potential_row(i, t), local)
    }

    /// Coefficients of `v_TE` on local edge `i`.
    pub fn edge_potential_coeffs(&self, i: usize, local: &[f64]) -> Vec<f64> {
        crate::linalg::matvec(&self.edge_potentials[i], local)
    }

    /// Coefficients of `G_T` (x-components then y-components).
    pub fn gradient_coeffs(&self, local: &[f64]) -> Vec<f64> {
        crate::linalg::matvec(&self.gradient, local)
    }

    /// Coefficients of `p_T`.
    pub fn potential_coeffs(&self, local: &[f64]) -> Vec<f64> {
        crate::linalg::matvec(&self.potential, local)
    }
}

/// Local operators of every element together with the unknown numbering.
#[derive(Clone, Debug)]
pub struct LocalOperators {
    pub k: usize,
    pub dofs: DofMap,
    pub elements: Vec<ElementOperators>,
}

impl LocalOperators {
    pub fn local_dofs(&self, mesh: &FittedMesh, t: usize) -> Vec<usize> {
        self.dofs.local_dofs(mesh, t)
    }
}

/// Builds the reconstructions of all elements (in parallel; results are in element order).
pub fn build_local_operators(mesh: &FittedMesh, k: usize) -> Result<LocalOperators> {
    let elements = (0..mesh.elements.len())
        .into_par_iter()
        .map(|t| ElementOperators::build(mesh, t, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalOperators {
        k,
        dofs: DofMap::new(mesh, k),
        elements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddr::interpolate;
    use crate::geometry::BoundingBox;
    use crate::mesh::{
        build_cartesian_mesh, cut_mesh, discretize_interface, Circle, CutOptions, EdgeKind, Region,
    };

    fn cut_circle() -> FittedMesh {
        let bg = build_cartesian_mesh(8, BoundingBox::unit_centered()).unwrap();
        let chain = discretize_interface(
            &Circle {
                center: Point::default(),
                radius: 0.3,
            },
            1,
            0.125,
        )
        .unwrap();
        cut_mesh(&bg, &chain, CutOptions::default()).unwrap()
    }

    fn check_consistency(
        mesh: &FittedMesh,
        k: usize,
        f: impl Fn(Point) -> f64 + Sync,
        g: impl Fn(Point) -> Point,
    ) {
        let ops = build_local_operators(mesh, k).unwrap();
        let u = interpolate(mesh, &ops.dofs, |_, p| f(p));
        for (t, op) in ops.elements.iter().enumerate() {
            let loc = u.local(&ops.local_dofs(mesh, t));
            for (p, _) in op.quad.iter() {
                let gr = op.gradient_at(&loc, p);
                assert!((gr - g(p)).norm() < 1e-9, "gradient on element {t}");
                assert!(
                    (op.potential_at(&loc, p) - f(p)).abs() < 1e-9,
                    "potential on element {t}"
                );
            }
            for (i, rule) in op.edge_rules.iter().enumerate() {
                for (q, (p, _)) in rule.rule.iter().enumerate() {
                    assert!((op.edge_potential_at(i, &loc, rule.params[q]) - f(p)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn reproduces_affine_functions_k0() {
        let m = cut_circle();
        check_consistency(
            &m,
            0,
            |p| 1.0 + 2.0 * p.x - 0.5 * p.y,
            |_| Point::new(2.0, -0.5),
        );
    }

    #[test]
    fn reproduces_quadratics_k1() {
        let m = cut_circle();
        check_consistency(
            &m,
            1,
            |p| p.x * p.x - 3.0 * p.x * p.y + p.y - 1.0,
            |p| Point::new(2.0 * p.x - 3.0 * p.y, -3.0 * p.x + 1.0),
        );
    }

    #[test]
    fn constants_have_zero_gradient_and_energy() {
        let m = cut_circle();
        for k in [0, 1] {
            let ops = build_local_operators(&m, k).unwrap();
            let u = interpolate(&m, &ops.dofs, |_, _| 1.0);
            for (t, op) in ops.elements.iter().enumerate() {
                let loc = u.local(&ops.local_dofs(&m, t));
                assert!(op.gradient_coeffs(&loc).iter().all(|c| c.abs() < 1e-10));
                assert!(crate::linalg::bilinear(&op.energy, &loc, &loc).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn edge_potential_shared_between_neighbours() {
        let m = cut_circle();
        let ops = build_local_operators(&m, 1).unwrap();
        let u = interpolate(&m, &ops.dofs, |r, p| {
            if r == Region::Int {
                p.x.sin()
            } else {
                (3.0 * p.y).exp()
            }
        });
        for (e, edge) in m.edges.iter().enumerate() {
            if edge.kind != EdgeKind::Interior {
                continue;
            }
            let vals: Vec<f64> = edge
                .elements
                .iter()
                .map(|&t| {
                    let i = m.elements[t].edges.iter().position(|&x| x == e).unwrap();
                    ops.elements[t].edge_potential_at(i, &u.local(&ops.local_dofs(&m, t)), 0.37)
                })
                .collect();
            assert!((vals[0] - vals[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn energy_matrix_is_symmetric_and_positive() {
        let m = cut_circle();
        let ops = build_local_operators(&m, 1).unwrap();
        for op in &ops.elements {
            let n = op.n_local;
            for a in 0..n {
                assert!(op.energy[(a, a)] >= -1e-14);
                for b in 0..n {
                    assert!(
                        (op.energy[(a, b)] - op.energy[(b, a)]).abs()
                            < 1e-9 * (1.0 + op.energy[(a, a)].abs())
                    );
                }
            }
        }
    }
}
