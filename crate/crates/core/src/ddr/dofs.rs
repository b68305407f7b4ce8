use crate::geometry::Point;
use crate::mesh::{FittedMesh, Region};
use crate::polyquad::{poly_dim, PolySpace};

/// Global numbering of the two-region discrete space.
///
/// Each region owns element, edge and vertex unknowns for the mesh entities it touches, so
/// interface edges and vertices carry one set of unknowns per side. Within a region the
/// numbering is: vertices, then edges (`k` moments each), then elements (`dim P^{k-1}` each).
#[derive(Clone, Debug)]
pub struct DofMap {
    pub k: usize,
    vertex: [Vec<Option<usize>>; 2],
    edge: [Vec<Option<usize>>; 2],
    element: Vec<usize>,
    n_dofs: usize,
    boundary: Vec<usize>,
}

impl DofMap {
    pub fn new(mesh: &FittedMesh, k: usize) -> Self {
        let nv = mesh.vertices.len();
        let ne = mesh.edges.len();
        let mut vertex = [vec![None; nv], vec![None; nv]];
        let mut edge = [vec![None; ne], vec![None; ne]];
        let mut element = vec![0; mesh.elements.len()];
        let edim = k;
        let tdim = poly_dim(k as i32 - 1);
        let mut next = 0;
        for r in Region::ALL {
            let ri = r.index();
            for el in mesh.elements.iter().filter(|e| e.region == r) {
                for &v in &el.vertices {
                    if vertex[ri][v].is_none() {
                        vertex[ri][v] = Some(usize::MAX);
                    }
                }
                for &e in &el.edges {
                    edge[ri][e] = Some(usize::MAX);
                }
            }
            for slot in vertex[ri].iter_mut().flatten() {
                *slot = next;
                next += 1;
            }
            for slot in edge[ri].iter_mut().flatten() {
                *slot = next;
                next += edim;
            }
            for (t, el) in mesh.elements.iter().enumerate() {
                if el.region == r {
                    element[t] = next;
                    next += tdim;
                }
            }
        }
        let mut boundary = Vec::new();
        for &e in &mesh.boundary_edges {
            let t = mesh.edges[e].elements[0];
            let ri = mesh.elements[t].region.index();
            for v in mesh.edges[e].vertices {
                boundary.push(vertex[ri][v].unwrap());
            }
            let o = edge[ri][e].unwrap();
            boundary.extend(o..o + edim);
        }
        boundary.sort_unstable();
        boundary.dedup();
        Self {
            k,
            vertex,
            edge,
            element,
            n_dofs: next,
            boundary,
        }
    }

    pub fn len(&self) -> usize {
        self.n_dofs
    }

    pub fn is_empty(&self) -> bool {
        self.n_dofs == 0
    }

    /// Unknowns attached to vertices and edges on the domain boundary, sorted.
    pub fn boundary_dofs(&self) -> &[usize] {
        &self.boundary
    }

    pub fn vertex_dof(&self, region: Region, v: usize) -> Option<usize> {
        self.vertex[region.index()][v]
    }

    /// First of the `k` moment unknowns of edge `e` on the given side.
    pub fn edge_dof(&self, region: Region, e: usize) -> Option<usize> {
        self.edge[region.index()][e]
    }

    pub fn element_dof(&self, t: usize) -> usize {
        self.element[t]
    }

    pub fn n_local(&self, mesh: &FittedMesh, t: usize) -> usize {
        let n = mesh.elements[t].vertices.len();
        n + n * self.k + poly_dim(self.k as i32 - 1)
    }

    /// Global indices of the local unknowns of element `t`, in local order.
    pub fn local_dofs(&self, mesh: &FittedMesh, t: usize) -> Vec<usize> {
        let el = &mesh.elements[t];
        let r = el.region;
        let mut out = Vec::with_capacity(self.n_local(mesh, t));
        out.extend(el.vertices.iter().map(|&v| self.vertex_dof(r, v).unwrap()));
        for &e in &el.edges {
            let o = self.edge_dof(r, e).unwrap();
            out.extend(o..o + self.k);
        }
        let o = self.element[t];
        out.extend(o..o + poly_dim(self.k as i32 - 1));
        out
    }

    /// `(vertex, interior unknown, exterior unknown)` for every interface vertex.
    pub fn interface_vertex_pairs(&self, mesh: &FittedMesh) -> Vec<(usize, usize, usize)> {
        let mut vs: Vec<usize> = mesh.interface_vertices().into_iter().collect();
        vs.sort_unstable();
        vs.into_iter()
            .map(|v| (v, self.vertex[0][v].unwrap(), self.vertex[1][v].unwrap()))
            .collect()
    }
}

/// Coefficient vector of the discrete space, indexed by a [`DofMap`].
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteVector(pub Vec<f64>);

impl DiscreteVector {
    pub fn zeros(dofs: &DofMap) -> Self {
        Self(vec![0.0; dofs.len()])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn local(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().map(|&i| self.0[i]).collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

/// Interpolates a two-region function: `L2` projections on elements and edges of degree
/// `k - 1`, point values at vertices, each taken from the side that owns the unknown.
pub fn interpolate(
    mesh: &FittedMesh,
    dofs: &DofMap,
    f: impl Fn(Region, Point) -> f64,
) -> DiscreteVector {
    let k = dofs.k as i32;
    let mut out = DiscreteVector::zeros(dofs);
    for r in Region::ALL {
        for (v, &p) in mesh.vertices.iter().enumerate() {
            if let Some(i) = dofs.vertex_dof(r, v) {
                out.0[i] = f(r, p);
            }
        }
        if k >= 1 {
            for (e, edge) in mesh.edges.iter().enumerate() {
                if let Some(o) = dofs.edge_dof(r, e) {
                    let [a, b] = edge.vertices;
                    let space = PolySpace::on_edge(mesh.vertices[a], mesh.vertices[b], k - 1);
                    for (j, c) in space.l2_project(|p| f(r, p)).into_iter().enumerate() {
                        out.0[o + j] = c;
                    }
                }
            }
        }
    }
    if k >= 1 {
        for (t, el) in mesh.elements.iter().enumerate() {
            let poly = mesh.element_polygon(t);
            let space = PolySpace::on_element(&poly, el.center, el.diameter, k - 1);
            let o = dofs.element_dof(t);
            for (j, c) in space
                .l2_project(|p| f(el.region, p))
                .into_iter()
                .enumerate()
            {
                out.0[o + j] = c;
            }
        }
    }
    out
}
