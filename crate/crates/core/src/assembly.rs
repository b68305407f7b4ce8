//! Global bilinear and linear forms, Dirichlet elimination and the sparse direct solve.

use crate::ddr::{DiscreteVector, DofMap, ElementOperators, LocalOperators};
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::linalg::max_generalized_eigenvalue;
use crate::mesh::{FittedMesh, InterfaceEdge, Region};
use crate::polyquad::{edge_quadrature, poly_dim, PolySpace};
use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use faer::{Col, Mat};
use rayon::prelude::*;
use std::fmt::Write as _;

/// Largest admissible backward error of the linear solve.
pub const SOLVE_TOLERANCE: f64 = 1e-10;

/// Averaging weights and penalty parameter of the interface coupling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceWeights {
    pub sigma_int: f64,
    pub sigma_ext: f64,
    pub lambda_int: f64,
    pub lambda_ext: f64,
    pub alpha: f64,
    pub eta: f64,
}

impl InterfaceWeights {
    pub fn new(sigma_int: f64, sigma_ext: f64, eta: f64) -> Result<Self> {
        if !(sigma_int > 0.0 && sigma_ext > 0.0 && sigma_int.is_finite() && sigma_ext.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "conductivities must be positive, got ({sigma_int}, {sigma_ext})"
            )));
        }
        if !(eta >= 0.0 && eta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "penalty must be non-negative, got {eta}"
            )));
        }
        let s = sigma_int + sigma_ext;
        Ok(Self {
            sigma_int,
            sigma_ext,
            lambda_int: sigma_ext / s,
            lambda_ext: sigma_int / s,
            alpha: 2.0 * sigma_int * sigma_ext / s,
            eta,
        })
    }

    pub fn sigma(&self, r: Region) -> f64 {
        match r {
            Region::Int => self.sigma_int,
            Region::Ext => self.sigma_ext,
        }
    }

    pub fn with_eta(self, eta: f64) -> Result<Self> {
        Self::new(self.sigma_int, self.sigma_ext, eta)
    }
}

/// Data of the stationary interface problem.
pub trait ProblemData: Sync {
    fn source(&self, region: Region, x: Point) -> f64;
    /// Prescribed potential jump `u_int - u_ext` at `x` on interface edge `edge`.
    fn jump(&self, edge: usize, x: Point) -> f64;
    /// Prescribed flux jump `(sigma grad u)_int . n - (sigma grad u)_ext . n`.
    fn flux_jump(&self, edge: usize, x: Point, n: Point) -> f64;
    fn dirichlet(&self, x: Point) -> f64;
}

/// Sparse matrix stored as sorted coordinate triplets with summed duplicates.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseMatrix {
    pub fn from_triplets(nrows: usize, ncols: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_by_key(|e| (e.0, e.1));
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(t.len());
        for (i, j, v) in t {
            match entries.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => entries.push((i, j, v)),
            }
        }
        Self {
            nrows,
            ncols,
            entries,
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
        }
        y
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries
            .binary_search_by(|e| (e.0, e.1).cmp(&(i, j)))
            .map(|p| self.entries[p].2)
            .unwrap_or(0.0)
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.nrows, self.ncols);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let mut rows = vec![0.0; self.nrows];
        for &(i, _, v) in &self.entries {
            rows[i] += v.abs();
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    /// Matrix Market coordinate format (1-based indices).
    pub fn to_matrix_market(&self) -> String {
        let mut s = String::from("%%MatrixMarket matrix coordinate real general\n");
        writeln!(s, "{} {} {}", self.nrows, self.ncols, self.entries.len()).unwrap();
        for &(i, j, v) in &self.entries {
            writeln!(s, "{} {} {:e}", i + 1, j + 1, v).unwrap();
        }
        s
    }
}

/// Dense vector in Matrix Market array format.
pub fn vector_to_matrix_market(b: &[f64]) -> String {
    let mut s = String::from("%%MatrixMarket matrix array real general\n");
    writeln!(s, "{} 1", b.len()).unwrap();
    for v in b {
        writeln!(s, "{v:e}").unwrap();
    }
    s
}

/// Restrictions of the two neighbours of an interface edge, acting on their concatenated
/// local unknowns (interior side first).
pub struct InterfaceTrace<'a> {
    pub edge: usize,
    pub normal: Point,
    pub length: f64,
    pub dofs: Vec<usize>,
    n_int: usize,
    int: (&'a ElementOperators, usize),
    ext: (&'a ElementOperators, usize),
}

impl<'a> InterfaceTrace<'a> {
    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }

    /// Quadrature along the edge with reference coordinates (shared by both sides).
    pub fn rule(&self) -> &crate::polyquad::EdgeRule {
        &self.int.0.edge_rules[self.int.1]
    }

    fn concat(&self, a: Vec<f64>, b: Vec<f64>, ca: f64, cb: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dofs.len());
        out.extend(a.into_iter().map(|v| ca * v));
        out.extend(b.into_iter().map(|v| cb * v));
        debug_assert_eq!(out.len(), self.dofs.len());
        out
    }

    /// Row giving the jump `v_int - v_ext` at reference coordinate `t`.
    pub fn jump_row(&self, t: f64) -> Vec<f64> {
        self.concat(
            self.int.0.edge_potential_row(self.int.1, t),
            self.ext.0.edge_potential_row(self.ext.1, t),
            1.0,
            -1.0,
        )
    }

    /// Row giving the skewed average `lambda_ext v_int + lambda_int v_ext`.
    pub fn skewed_average_row(&self, t: f64, w: &InterfaceWeights) -> Vec<f64> {
        self.concat(
            self.int.0.edge_potential_row(self.int.1, t),
            self.ext.0.edge_potential_row(self.ext.1, t),
            w.lambda_ext,
            w.lambda_int,
        )
    }

    /// Row giving the weighted flux average `{sigma G v} . n_E` at `x`.
    pub fn flux_average_row(&self, x: Point, w: &InterfaceWeights) -> Vec<f64> {
        let n = self.normal;
        let side = |op: &ElementOperators| {
            let (gx, gy) = op.gradient_rows(x);
            gx.iter()
                .zip(&gy)
                .map(|(a, b)| a * n.x + b * n.y)
                .collect::<Vec<_>>()
        };
        self.concat(
            side(self.int.0),
            side(self.ext.0),
            w.lambda_int * w.sigma_int,
            w.lambda_ext * w.sigma_ext,
        )
    }

    pub fn split<'v>(&self, local: &'v [f64]) -> (&'v [f64], &'v [f64]) {
        local.split_at(self.n_int)
    }
}

fn local_edge_index(mesh: &FittedMesh, t: usize, e: usize) -> usize {
    mesh.elements[t]
        .edges
        .iter()
        .position(|&x| x == e)
        .expect("edge belongs to element")
}

/// Jump, skewed-average and flux-average maps of an interface edge.
pub fn edge_trace_ops<'a>(
    mesh: &FittedMesh,
    ops: &'a LocalOperators,
    ie: &InterfaceEdge,
) -> InterfaceTrace<'a> {
    let mut dofs = ops.local_dofs(mesh, ie.int_element);
    let n_int = dofs.len();
    dofs.extend(ops.local_dofs(mesh, ie.ext_element));
    let edge = &mesh.edges[ie.edge];
    InterfaceTrace {
        edge: ie.edge,
        normal: edge.normal,
        length: edge.length,
        dofs,
        n_int,
        int: (
            &ops.elements[ie.int_element],
            local_edge_index(mesh, ie.int_element, ie.edge),
        ),
        ext: (
            &ops.elements[ie.ext_element],
            local_edge_index(mesh, ie.ext_element, ie.edge),
        ),
    }
}

/// Squared discrete trace constant: the largest `h_E ||q||_E^2 / ||q||_T^2` over `q` in
/// `P^k(T)` and all pairs of an interface edge `E` and a neighbour `T`.
pub fn trace_constant_squared(mesh: &FittedMesh, ops: &LocalOperators) -> f64 {
    let dk = poly_dim(ops.k as i32);
    let pairs: Vec<(usize, usize)> = mesh
        .interface_edges
        .iter()
        .flat_map(|ie| [(ie.int_element, ie.edge), (ie.ext_element, ie.edge)])
        .collect();
    pairs
        .par_iter()
        .map(|&(t, e)| {
            let op = &ops.elements[t];
            let (a, b) = mesh.edge_endpoints(e);
            let h_e = mesh.edges[e].length;
            let mut me = Mat::<f64>::zeros(dk, dk);
            let mut mt = Mat::<f64>::zeros(dk, dk);
            for (p, w) in edge_quadrature(a, b, 2 * ops.k).rule.iter() {
                let phi = op.basis.eval(p);
                for i in 0..dk {
                    for j in 0..dk {
                        me[(i, j)] += h_e * w * phi[i] * phi[j];
                    }
                }
            }
            for (p, w) in op.quad.iter() {
                let phi = op.basis.eval(p);
                for i in 0..dk {
                    for j in 0..dk {
                        mt[(i, j)] += w * phi[i] * phi[j];
                    }
                }
            }
            max_generalized_eigenvalue(&me, &mt)
        })
        .reduce(|| 0.0, f64::max)
}

/// Default penalty `3 C_tr^2 N_d`, with `N_d` the largest number of interface edges of an element.
pub fn default_eta(mesh: &FittedMesh, ops: &LocalOperators) -> f64 {
    if mesh.interface_edges.is_empty() {
        return 0.0;
    }
    3.0 * trace_constant_squared(mesh, ops) * mesh.max_interface_edges_per_element() as f64
}

/// Assembles the (non-symmetric) matrix of the bilinear form on the whole space.
pub fn assemble_bilinear(
    mesh: &FittedMesh,
    ops: &LocalOperators,
    w: &InterfaceWeights,
) -> SparseMatrix {
    let n = ops.dofs.len();
    let element_parts: Vec<Vec<(usize, usize, f64)>> = (0..mesh.elements.len())
        .into_par_iter()
        .map(|t| {
            let idx = ops.local_dofs(mesh, t);
            let s = w.sigma(mesh.elements[t].region);
            let e = &ops.elements[t].energy;
            let mut out = Vec::with_capacity(idx.len() * idx.len());
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    let v = s * e[(a, b)];
                    if v != 0.0 {
                        out.push((i, j, v));
                    }
                }
            }
            out
        })
        .collect();
    let interface_parts: Vec<Vec<(usize, usize, f64)>> = mesh
        .interface_edges
        .par_iter()
        .map(|ie| {
            let tr = edge_trace_ops(mesh, ops, ie);
            let m = tr.len();
            let mut local = vec![0.0; m * m];
            let pen = w.eta * w.alpha / tr.length;
            let rule = tr.rule();
            for (q, (x, wq)) in rule.rule.iter().enumerate() {
                let jr = tr.jump_row(rule.params[q]);
                let fr = tr.flux_average_row(x, w);
                for a in 0..m {
                    if jr[a] == 0.0 {
                        continue;
                    }
                    for b in 0..m {
                        local[a * m + b] += wq * jr[a] * (pen * jr[b] - fr[b]);
                    }
                }
            }
            let mut out = Vec::with_capacity(m * m);
            for a in 0..m {
                for b in 0..m {
                    let v = local[a * m + b];
                    if v != 0.0 {
                        out.push((tr.dofs[a], tr.dofs[b], v));
                    }
                }
            }
            out
        })
        .collect();
    let triplets = element_parts
        .into_iter()
        .chain(interface_parts)
        .flatten()
        .collect();
    SparseMatrix::from_triplets(n, n, triplets)
}

/// Assembles the right-hand side of the linear form (before the Dirichlet lift).
pub fn assemble_rhs(
    mesh: &FittedMesh,
    ops: &LocalOperators,
    w: &InterfaceWeights,
    data: &dyn ProblemData,
) -> Vec<f64> {
    let n = ops.dofs.len();
    let element_parts: Vec<(Vec<usize>, Vec<f64>)> = (0..mesh.elements.len())
        .into_par_iter()
        .map(|t| {
            let op = &ops.elements[t];
            let r = mesh.elements[t].region;
            let mut loc = vec![0.0; op.n_local];
            for (x, wq) in op.quad.iter() {
                let f = data.source(r, x);
                if f == 0.0 {
                    continue;
                }
                for (l, p) in loc.iter_mut().zip(op.potential_row(x)) {
                    *l += wq * f * p;
                }
            }
            (ops.local_dofs(mesh, t), loc)
        })
        .collect();
    let interface_parts: Vec<(Vec<usize>, Vec<f64>)> = mesh
        .interface_edges
        .par_iter()
        .map(|ie| {
            let tr = edge_trace_ops(mesh, ops, ie);
            let pen = w.eta * w.alpha / tr.length;
            let mut loc = vec![0.0; tr.len()];
            let rule = tr.rule();
            for (q, (x, wq)) in rule.rule.iter().enumerate() {
                let t = rule.params[q];
                let phi = data.flux_jump(ie.edge, x, tr.normal);
                let jmp = data.jump(ie.edge, x);
                if phi != 0.0 {
                    for (l, s) in loc.iter_mut().zip(tr.skewed_average_row(t, w)) {
                        *l += wq * phi * s;
                    }
                }
                if jmp != 0.0 && pen != 0.0 {
                    for (l, j) in loc.iter_mut().zip(tr.jump_row(t)) {
                        *l += wq * pen * jmp * j;
                    }
                }
            }
            (tr.dofs, loc)
        })
        .collect();
    let mut b = vec![0.0; n];
    for (idx, loc) in element_parts.into_iter().chain(interface_parts) {
        for (i, v) in idx.into_iter().zip(loc) {
            b[i] += v;
        }
    }
    b
}

/// Interpolated boundary values, aligned with [`DofMap::boundary_dofs`].
pub fn dirichlet_values(mesh: &FittedMesh, dofs: &DofMap, g: impl Fn(Point) -> f64) -> Vec<f64> {
    let bd = dofs.boundary_dofs();
    let mut vals = vec![0.0; bd.len()];
    let pos = |i: usize| bd.binary_search(&i).expect("boundary unknown");
    for &e in &mesh.boundary_edges {
        let edge = &mesh.edges[e];
        let r = mesh.elements[edge.elements[0]].region;
        for v in edge.vertices {
            vals[pos(dofs.vertex_dof(r, v).unwrap())] = g(mesh.vertices[v]);
        }
        if dofs.k >= 1 {
            let (a, b) = mesh.edge_endpoints(e);
            let space = PolySpace::on_edge(a, b, dofs.k as i32 - 1);
            let o = dofs.edge_dof(r, e).unwrap();
            for (j, c) in space.l2_project(&g).into_iter().enumerate() {
                vals[pos(o + j)] = c;
            }
        }
    }
    vals
}

/// Factorized system restricted to the free unknowns, reusable for several right-hand sides
/// and boundary data.
pub struct ReducedSystem {
    n: usize,
    free: Vec<usize>,
    fixed: Vec<usize>,
    /// Free-free block in free numbering.
    matrix: SparseMatrix,
    /// Free-fixed coupling `(free row, fixed position, value)`.
    coupling: Vec<(usize, usize, f64)>,
    lu: Option<faer::sparse::linalg::solvers::Lu<usize, f64>>,
    norm: f64,
}

impl ReducedSystem {
    /// Eliminates the `fixed` unknowns (sorted) and factorizes the remaining block.
    pub fn new(a: &SparseMatrix, fixed: &[usize]) -> Result<Self> {
        let n = a.nrows;
        let mut position: Vec<Option<usize>> = vec![None; n];
        let mut is_fixed = vec![None; n];
        for (p, &i) in fixed.iter().enumerate() {
            is_fixed[i] = Some(p);
        }
        let mut free = Vec::with_capacity(n - fixed.len());
        for i in 0..n {
            if is_fixed[i].is_none() {
                position[i] = Some(free.len());
                free.push(i);
            }
        }
        let mut inner = Vec::with_capacity(a.nnz());
        let mut coupling = Vec::new();
        for &(i, j, v) in &a.entries {
            if let Some(fi) = position[i] {
                match (position[j], is_fixed[j]) {
                    (Some(fj), _) => inner.push((fi, fj, v)),
                    (None, Some(p)) => coupling.push((fi, p, v)),
                    _ => unreachable!(),
                }
            }
        }
        let matrix = SparseMatrix::from_triplets(free.len(), free.len(), inner);
        let lu = if free.is_empty() {
            None
        } else {
            let trip: Vec<Triplet<usize, usize, f64>> = matrix
                .entries
                .iter()
                .map(|&(i, j, v)| Triplet::new(i, j, v))
                .collect();
            let sp =
                SparseColMat::<usize, f64>::try_new_from_triplets(free.len(), free.len(), &trip)
                    .map_err(|e| Error::SolveFailure {
                        reason: format!("matrix construction: {e:?}"),
                        residual: f64::NAN,
                    })?;
            Some(sp.sp_lu().map_err(|e| Error::SolveFailure {
                reason: format!("factorization: {e:?}"),
                residual: f64::NAN,
            })?)
        };
        let norm = matrix.norm_inf();
        Ok(Self {
            n,
            free,
            fixed: fixed.to_vec(),
            matrix,
            coupling,
            lu,
            norm,
        })
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn free_matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    fn lu_solve(&self, rhs: &[f64]) -> Vec<f64> {
        let lu = self.lu.as_ref().expect("non-empty system");
        let col = Col::<f64>::from_fn(rhs.len(), |i| rhs[i]);
        let x = lu.solve(&col);
        (0..rhs.len()).map(|i| x[i]).collect()
    }

    /// Solves with right-hand side `b` (full numbering) and fixed values aligned with `fixed`.
    pub fn solve(&self, b: &[f64], fixed_values: &[f64]) -> Result<DiscreteVector> {
        let mut rhs: Vec<f64> = self.free.iter().map(|&i| b[i]).collect();
        for &(fi, p, v) in &self.coupling {
            rhs[fi] -= v * fixed_values[p];
        }
        let mut out = vec![0.0; self.n];
        for (&i, &g) in self.fixed.iter().zip(fixed_values) {
            out[i] = g;
        }
        if self.free.is_empty() {
            return Ok(DiscreteVector(out));
        }
        let mut x = self.lu_solve(&rhs);
        let mut berr = self.backward_error(&x, &rhs);
        if berr > 1e-14 {
            let r: Vec<f64> = rhs
                .iter()
                .zip(self.matrix.matvec(&x))
                .map(|(a, b)| a - b)
                .collect();
            let dx = self.lu_solve(&r);
            let refined: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
            let e2 = self.backward_error(&refined, &rhs);
            if e2 < berr {
                x = refined;
                berr = e2;
            }
        }
        if !(berr <= SOLVE_TOLERANCE) {
            return Err(Error::SolveFailure {
                reason: "residual above tolerance".into(),
                residual: berr,
            });
        }
        for (&i, v) in self.free.iter().zip(x) {
            out[i] = v;
        }
        Ok(DiscreteVector(out))
    }

    /// `||b - A x||_inf / (||A||_inf ||x||_inf + ||b||_inf)`.
    pub fn backward_error(&self, x: &[f64], rhs: &[f64]) -> f64 {
        let ax = self.matrix.matvec(x);
        let r = ax
            .iter()
            .zip(rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let xn = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let bn = rhs.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let d = self.norm * xn + bn;
        if d == 0.0 {
            0.0
        } else {
            r / d
        }
    }
}

/// Assembled stationary problem: matrix, factorized reduced system and weights.
pub struct StationaryProblem {
    pub ops: LocalOperators,
    pub weights: InterfaceWeights,
    pub matrix: SparseMatrix,
    pub system: ReducedSystem,
}

impl StationaryProblem {
    pub fn new(mesh: &FittedMesh, ops: LocalOperators, weights: InterfaceWeights) -> Result<Self> {
        let matrix = assemble_bilinear(mesh, &ops, &weights);
        let system = ReducedSystem::new(&matrix, ops.dofs.boundary_dofs())?;
        Ok(Self {
            ops,
            weights,
            matrix,
            system,
        })
    }

    pub fn dofs(&self) -> &DofMap {
        &self.ops.dofs
    }

    pub fn rhs(&self, mesh: &FittedMesh, data: &dyn ProblemData) -> Vec<f64> {
        assemble_rhs(mesh, &self.ops, &self.weights, data)
    }

    pub fn solve(&self, mesh: &FittedMesh, data: &dyn ProblemData) -> Result<DiscreteVector> {
        let b = self.rhs(mesh, data);
        let g = dirichlet_values(mesh, &self.ops.dofs, |x| data.dirichlet(x));
        self.system.solve(&b, &g)
    }
}

/// Evaluates `a_h(w, v)` directly from the reconstructions at quadrature points.
pub fn evaluate_bilinear(
    mesh: &FittedMesh,
    ops: &LocalOperators,
    weights: &InterfaceWeights,
    w: &DiscreteVector,
    v: &DiscreteVector,
) -> f64 {
    let mut total = 0.0;
    for (t, op) in ops.elements.iter().enumerate() {
        let idx = ops.local_dofs(mesh, t);
        let (wl, vl) = (w.local(&idx), v.local(&idx));
        let s = weights.sigma(mesh.elements[t].region);
        let mut vol = 0.0;
        for (x, q) in op.quad.iter() {
            vol += q * op.gradient_at(&wl, x).dot(op.gradient_at(&vl, x));
        }
        let mut stab = 0.0;
        for (i, rule) in op.edge_rules.iter().enumerate() {
            for (qi, (x, q)) in rule.rule.iter().enumerate() {
                let tp = rule.params[qi];
                let dw = op.potential_at(&wl, x) - op.edge_potential_at(i, &wl, tp);
                let dv = op.potential_at(&vl, x) - op.edge_potential_at(i, &vl, tp);
                stab += q * dw * dv;
            }
        }
        total += s * (vol + stab / op.h);
    }
    for ie in &mesh.interface_edges {
        let tr = edge_trace_ops(mesh, ops, ie);
        let wl = w.local(&tr.dofs);
        let vl = v.local(&tr.dofs);
        let (wi, we) = tr.split(&wl);
        let (vi, ve) = tr.split(&vl);
        let (oi, ii) = tr.int;
        let (oe, ei) = tr.ext;
        let rule = tr.rule();
        for (q, (x, wq)) in rule.rule.iter().enumerate() {
            let t = rule.params[q];
            let jw = oi.edge_potential_at(ii, wi, t) - oe.edge_potential_at(ei, we, t);
            let jv = oi.edge_potential_at(ii, vi, t) - oe.edge_potential_at(ei, ve, t);
            let flux =
                weights.lambda_int * weights.sigma_int * oi.gradient_at(wi, x).dot(tr.normal)
                    + weights.lambda_ext * weights.sigma_ext * oe.gradient_at(we, x).dot(tr.normal);
            total += wq * (-flux * jv + weights.eta * weights.alpha / tr.length * jw * jv);
        }
    }
    total
}
