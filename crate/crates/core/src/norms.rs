//! Discrete norms: energy norm, interface jump seminorm, component L2 norm, and the L2 error of
//! the potential reconstruction.

use crate::assembly::{edge_trace_ops, InterfaceWeights, SparseMatrix};
use crate::ddr::{DiscreteVector, LocalOperators};
use crate::geometry::Point;
use crate::linalg::bilinear;
use crate::mesh::{FittedMesh, Region};
use crate::polyquad::{edge_quadrature, element_quadrature, EdgeMonomials, PolySpace};
use rayon::prelude::*;

/// `|v|_J^2 = sum_E alpha / h_E ||[v]||_E^2`.
pub fn jump_seminorm_squared(
    mesh: &FittedMesh,
    ops: &LocalOperators,
    w: &InterfaceWeights,
    v: &DiscreteVector,
) -> f64 {
    mesh.interface_edges
        .iter()
        .map(|ie| {
            let tr = edge_trace_ops(mesh, ops, ie);
            let loc = v.local(&tr.dofs);
            let rule = tr.rule();
            let s: f64 = rule
                .rule
                .iter()
                .enumerate()
                .map(|(q, (_, wq))| {
                    let j = crate::linalg::dot(&tr.jump_row(rule.params[q]), &loc);
                    wq * j * j
                })
                .sum();
            w.alpha / tr.length * s
        })
        .sum()
}

pub fn jump_seminorm(
    mesh: &FittedMesh,
    ops: &LocalOperators,
    w: &InterfaceWeights,
    v: &DiscreteVector,
) -> f64 {
    jump_seminorm_squared(mesh, ops, w, v).sqrt()
}

/// Volume and stabilization part `sum_T sigma_T (||G_T v||^2 + h_T^{-1} sum_E ||p_T v - v_TE||^2)`.
pub fn bulk_energy_squared(
    mesh: &FittedMesh,
    ops: &LocalOperators,
    w: &InterfaceWeights,
    v: &DiscreteVector,
) -> f64 {
    (0..mesh.elements.len())
        .into_par_iter()
        .map(|t| {
            let loc = v.local(&ops.local_dofs(mesh, t));
            w.sigma(mesh.elements[t].region) * bilinear(&ops.elements[t].energy, &loc, &loc)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum()
}

pub fn energy_norm(
    mesh: &FittedMesh,
    ops: &LocalOperators,
    w: &InterfaceWeights,
    v: &DiscreteVector,
) -> f64 {
    (bulk_energy_squared(mesh, ops, w, v).max(0.0) + jump_seminorm_squared(mesh, ops, w, v)).sqrt()
}

/// Sparse matrix of the squared energy norm on the whole space.
pub fn energy_matrix(
    mesh: &FittedMesh,
    ops: &LocalOperators,
    w: &InterfaceWeights,
) -> SparseMatrix {
    let mut trip = Vec::new();
    for (t, op) in ops.elements.iter().enumerate() {
        let idx = ops.local_dofs(mesh, t);
        let s = w.sigma(mesh.elements[t].region);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                trip.push((i, j, s * op.energy[(a, b)]));
            }
        }
    }
    for ie in &mesh.interface_edges {
        let tr = edge_trace_ops(mesh, ops, ie);
        let rule = tr.rule();
        let c = w.alpha / tr.length;
        for q in 0..rule.rule.len() {
            let jr = tr.jump_row(rule.params[q]);
            let wq = rule.rule.weights[q];
            for (a, &i) in tr.dofs.iter().enumerate() {
                for (b, &j) in tr.dofs.iter().enumerate() {
                    trip.push((i, j, c * wq * jr[a] * jr[b]));
                }
            }
        }
    }
    let n = ops.dofs.len();
    SparseMatrix::from_triplets(n, n, trip)
}

/// `||v||_{0,h}^2 = sum_T (||v_T||_T^2 + h_T sum_E ||v_E||_E^2)`; identically zero for `k = 0`.
pub fn l2_component_norm(mesh: &FittedMesh, ops: &LocalOperators, v: &DiscreteVector) -> f64 {
    let k = ops.k as i32;
    if k == 0 {
        return 0.0;
    }
    let d = &ops.dofs;
    let mut total = 0.0;
    for (t, el) in mesh.elements.iter().enumerate() {
        let poly = mesh.element_polygon(t);
        let space = PolySpace::on_element(&poly, el.center, el.diameter, k - 1);
        let o = d.element_dof(t);
        let coeffs = &v.0[o..o + space.dim()];
        let quad = element_quadrature(&poly, el.center, 2 * (k as usize - 1));
        total += quad.integrate(|p| space.evaluate(coeffs, p).powi(2));
        for &e in &el.edges {
            let (a, b) = mesh.edge_endpoints(e);
            let o = d.edge_dof(el.region, e).unwrap();
            let basis = EdgeMonomials::new(k - 1);
            let rule = edge_quadrature(a, b, 2 * (k as usize - 1));
            let s: f64 = rule
                .rule
                .iter()
                .zip(&rule.params)
                .map(|((_, wq), &tp)| {
                    let val: f64 = basis
                        .eval(tp)
                        .iter()
                        .zip(&v.0[o..o + d.k])
                        .map(|(x, c)| x * c)
                        .sum();
                    wq * val * val
                })
                .sum();
            total += el.diameter * s;
        }
    }
    total.sqrt()
}

/// `(sum_T ||p_T v - u||_T^2)^{1/2}` for a two-region function `u`.
pub fn reconstruction_l2_error(
    mesh: &FittedMesh,
    ops: &LocalOperators,
    v: &DiscreteVector,
    u: impl Fn(Region, Point) -> f64 + Sync,
) -> f64 {
    (0..mesh.elements.len())
        .into_par_iter()
        .map(|t| {
            let op = &ops.elements[t];
            let r = mesh.elements[t].region;
            let coeffs = op.potential_coeffs(&v.local(&ops.local_dofs(mesh, t)));
            op.quad
                .iter()
                .map(|(x, w)| {
                    let p: f64 = op
                        .basis
                        .eval(x)
                        .iter()
                        .zip(&coeffs)
                        .map(|(a, b)| a * b)
                        .sum();
                    w * (p - u(r, x)).powi(2)
                })
                .sum::<f64>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum::<f64>()
        .sqrt()
}

/// `(sum_T ||p_T v||_T^2)^{1/2}`.
pub fn reconstruction_l2_norm(mesh: &FittedMesh, ops: &LocalOperators, v: &DiscreteVector) -> f64 {
    reconstruction_l2_error(mesh, ops, v, |_, _| 0.0)
}
