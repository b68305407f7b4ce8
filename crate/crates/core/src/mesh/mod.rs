//! Polygonal meshes fitted to an interface.
//!
//! A [`FittedMesh`] stores each geometric vertex and edge once. Elements carry a region label,
//! and every edge on the interface is adjacent to exactly one interior and one exterior
//! element. The duplication of interface unknowns is handled by [`crate::ddr::DofMap`].

mod cut;
mod interface;
mod io;

pub use cut::{cut_mesh, CutOptions};
pub use interface::{
    discretize_interface, Circle, DeformedCircle, ParametricCurve, PolygonalChain, SquareLoop,
};
pub use io::{read_polymesh, write_polymesh, NodalValues};

use crate::error::{Error, Result};
use crate::geometry::{diameter, interior_point, is_simple, signed_area, BoundingBox, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{HashMap, HashSet};

/// Subdomain label of an element.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    Int,
    Ext,
}

impl Region {
    pub const ALL: [Region; 2] = [Region::Int, Region::Ext];

    pub fn index(self) -> usize {
        match self {
            Region::Int => 0,
            Region::Ext => 1,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Region::Int => "int",
            Region::Ext => "ext",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "int" => Some(Region::Int),
            "ext" => Some(Region::Ext),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    Interior,
    Boundary,
    Interface,
}

/// A mesh edge with a fixed unit normal `n_E` (right-hand normal of `vertices[0] -> vertices[1]`).
#[derive(Clone, Debug)]
pub struct Edge {
    pub vertices: [usize; 2],
    pub normal: Point,
    pub length: f64,
    pub elements: Vec<usize>,
    pub kind: EdgeKind,
}

/// A simple polygonal element with counter-clockwise vertex loop.
///
/// `edges[i]` joins `vertices[i]` and `vertices[i + 1]`; `orientations[i] * n_E` points out of
/// the element.
#[derive(Clone, Debug)]
pub struct Element {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub orientations: Vec<f64>,
    pub region: Region,
    pub area: f64,
    pub diameter: f64,
    /// Interior point `x_T` used to center local bases.
    pub center: Point,
}

/// An interface edge with its interior and exterior neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InterfaceEdge {
    pub edge: usize,
    pub int_element: usize,
    pub ext_element: usize,
}

/// Quality information gathered while building a mesh.
#[derive(Clone, Debug, Default)]
pub struct MeshDiagnostics {
    /// Elements with `area < eps * h_T^2`.
    pub degenerate_cells: Vec<usize>,
    /// Smallest `area / h_T^2` over the mesh.
    pub min_area_ratio: f64,
}

#[derive(Clone, Debug)]
pub struct FittedMesh {
    pub domain: BoundingBox,
    pub vertices: Vec<Point>,
    pub edges: Vec<Edge>,
    pub elements: Vec<Element>,
    pub interface_edges: Vec<InterfaceEdge>,
    pub boundary_edges: Vec<usize>,
    /// Interface vertices ordered along the closed interface (empty when there is no interface).
    pub interface_loop: Vec<usize>,
    pub diagnostics: MeshDiagnostics,
}

/// Relative area threshold below which a cell is reported as degenerate.
pub const DEGENERATE_AREA_RATIO: f64 = 1e-6;

impl FittedMesh {
    /// Builds the mesh topology and geometry from element vertex loops.
    ///
    /// `interface` lists the (unordered) vertex pairs of edges lying on the interface.
    pub fn from_polygons(
        domain: BoundingBox,
        vertices: Vec<Point>,
        mut loops: Vec<Vec<usize>>,
        regions: Vec<Region>,
        interface: &HashSet<(usize, usize)>,
    ) -> Result<Self> {
        if loops.len() != regions.len() {
            return Err(Error::InvalidInput(
                "one region label per element required".into(),
            ));
        }
        for l in loops.iter_mut() {
            let poly: Vec<Point> = l.iter().map(|&v| vertices[v]).collect();
            if signed_area(&poly) < 0.0 {
                l.reverse();
            }
        }
        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut elements = Vec::with_capacity(loops.len());
        for (t, (l, &region)) in loops.iter().zip(&regions).enumerate() {
            let n = l.len();
            if n < 3 {
                return Err(Error::DegenerateElement {
                    element: t,
                    reason: "fewer than 3 vertices".into(),
                });
            }
            let mut el_edges = Vec::with_capacity(n);
            for i in 0..n {
                let (a, b) = (l[i], l[(i + 1) % n]);
                if a == b {
                    return Err(Error::DegenerateElement {
                        element: t,
                        reason: "zero-length edge".into(),
                    });
                }
                let key = (a.min(b), a.max(b));
                let e = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push(Edge {
                        vertices: [key.0, key.1],
                        normal: Point::default(),
                        length: 0.0,
                        elements: Vec::new(),
                        kind: EdgeKind::Interior,
                    });
                    edges.len() - 1
                });
                edges[e].elements.push(t);
                el_edges.push(e);
            }
            elements.push(Element {
                vertices: l.clone(),
                edges: el_edges,
                orientations: vec![1.0; n],
                region,
                area: 0.0,
                diameter: 0.0,
                center: Point::default(),
            });
        }

        let mut interface_edges = Vec::new();
        let mut boundary_edges = Vec::new();
        for (e, edge) in edges.iter_mut().enumerate() {
            let key = (edge.vertices[0], edge.vertices[1]);
            match edge.elements.len() {
                1 => {
                    if interface.contains(&key) {
                        return Err(Error::Topology(format!(
                            "interface edge {e} has a single neighbour"
                        )));
                    }
                    edge.kind = EdgeKind::Boundary;
                    boundary_edges.push(e);
                }
                2 => {
                    let (t1, t2) = (edge.elements[0], edge.elements[1]);
                    let (r1, r2) = (elements[t1].region, elements[t2].region);
                    if interface.contains(&key) {
                        if r1 == r2 {
                            return Err(Error::Topology(format!(
                                "interface edge {e} separates two {} elements",
                                r1.label()
                            )));
                        }
                        edge.kind = EdgeKind::Interface;
                        let (ti, te) = if r1 == Region::Int {
                            (t1, t2)
                        } else {
                            (t2, t1)
                        };
                        // orient along the counter-clockwise loop of the interior element so that
                        // n_E points from the interior to the exterior
                        let l = &elements[ti].vertices;
                        let pos = elements[ti].edges.iter().position(|&x| x == e).unwrap();
                        edge.vertices = [l[pos], l[(pos + 1) % l.len()]];
                        interface_edges.push(InterfaceEdge {
                            edge: e,
                            int_element: ti,
                            ext_element: te,
                        });
                    } else if r1 != r2 {
                        return Err(Error::Topology(format!(
                            "edge {e} separates regions but is not on the interface"
                        )));
                    }
                }
                k => return Err(Error::Topology(format!("edge {e} shared by {k} elements"))),
            }
        }

        let mut mesh = Self {
            domain,
            vertices,
            edges,
            elements,
            interface_edges,
            boundary_edges,
            interface_loop: Vec::new(),
            diagnostics: MeshDiagnostics::default(),
        };
        mesh.rebuild_geometry()?;
        mesh.interface_loop = mesh.order_interface_loop()?;
        Ok(mesh)
    }

    /// Recomputes normals, lengths, orientations, areas, diameters and interior points.
    pub fn rebuild_geometry(&mut self) -> Result<()> {
        for e in self.edges.iter_mut() {
            let (a, b) = (self.vertices[e.vertices[0]], self.vertices[e.vertices[1]]);
            e.length = a.dist(b);
            if e.length == 0.0 {
                return Err(Error::Topology("zero-length edge".into()));
            }
            e.normal = (1.0 / e.length) * (b - a).rot_cw();
        }
        let mut min_ratio = f64::INFINITY;
        let mut degenerate = Vec::new();
        for (t, el) in self.elements.iter_mut().enumerate() {
            let n = el.vertices.len();
            for i in 0..n {
                let e = &self.edges[el.edges[i]];
                el.orientations[i] = if e.vertices[0] == el.vertices[i] {
                    1.0
                } else {
                    -1.0
                };
            }
            let poly: Vec<Point> = el.vertices.iter().map(|&v| self.vertices[v]).collect();
            el.area = signed_area(&poly);
            if el.area <= 0.0 {
                return Err(Error::DegenerateElement {
                    element: t,
                    reason: format!("area {:e}", el.area),
                });
            }
            el.diameter = diameter(&poly);
            el.center = interior_point(&poly);
            let ratio = el.area / (el.diameter * el.diameter);
            min_ratio = min_ratio.min(ratio);
            if ratio < DEGENERATE_AREA_RATIO {
                degenerate.push(t);
            }
        }
        self.diagnostics = MeshDiagnostics {
            degenerate_cells: degenerate,
            min_area_ratio: min_ratio,
        };
        Ok(())
    }

    fn order_interface_loop(&self) -> Result<Vec<usize>> {
        if self.interface_edges.is_empty() {
            return Ok(Vec::new());
        }
        let mut next: HashMap<usize, usize> = HashMap::new();
        for ie in &self.interface_edges {
            let [a, b] = self.edges[ie.edge].vertices;
            if next.insert(a, b).is_some() {
                return Err(Error::Topology(
                    "interface is not a simple closed chain".into(),
                ));
            }
        }
        let start = self.edges[self.interface_edges[0].edge].vertices[0];
        let mut order = vec![start];
        let mut v = next[&start];
        while v != start {
            order.push(v);
            v = *next
                .get(&v)
                .ok_or_else(|| Error::Topology("interface chain is open".into()))?;
            if order.len() > next.len() {
                return Err(Error::Topology("interface chain does not close".into()));
            }
        }
        if order.len() != self.interface_edges.len() {
            return Err(Error::Topology(
                "interface consists of several loops".into(),
            ));
        }
        Ok(order)
    }

    pub fn element_polygon(&self, t: usize) -> Vec<Point> {
        self.elements[t]
            .vertices
            .iter()
            .map(|&v| self.vertices[v])
            .collect()
    }

    pub fn edge_endpoints(&self, e: usize) -> (Point, Point) {
        let [a, b] = self.edges[e].vertices;
        (self.vertices[a], self.vertices[b])
    }

    /// Largest element diameter.
    pub fn h(&self) -> f64 {
        self.elements.iter().map(|e| e.diameter).fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.elements.iter().map(|e| e.area).sum()
    }

    /// Vertices lying on the boundary of the domain.
    pub fn boundary_vertices(&self) -> HashSet<usize> {
        self.boundary_edges
            .iter()
            .flat_map(|&e| self.edges[e].vertices)
            .collect()
    }

    pub fn interface_vertices(&self) -> HashSet<usize> {
        self.interface_edges
            .iter()
            .flat_map(|ie| self.edges[ie.edge].vertices)
            .collect()
    }

    /// Maximum number of interface edges of a single element.
    pub fn max_interface_edges_per_element(&self) -> usize {
        let mut count = vec![0usize; self.elements.len()];
        for ie in &self.interface_edges {
            count[ie.int_element] += 1;
            count[ie.ext_element] += 1;
        }
        count.into_iter().max().unwrap_or(0)
    }

    /// Relabels every element according to `classify(x_T)` (no interface edges are created).
    pub fn with_regions(mut self, classify: impl Fn(Point) -> Region) -> Result<Self> {
        if !self.interface_edges.is_empty() {
            return Err(Error::InvalidInput("mesh already has an interface".into()));
        }
        for el in self.elements.iter_mut() {
            el.region = classify(el.center);
        }
        let regions = self.elements.iter().map(|e| e.region).collect();
        let loops = self.elements.iter().map(|e| e.vertices.clone()).collect();
        Self::from_polygons(self.domain, self.vertices, loops, regions, &HashSet::new())
    }

    /// Checks the geometric and topological invariants to the given relative tolerance.
    pub fn check_invariants(&self, tol: f64) -> Result<()> {
        let area = self.total_area();
        if ((area - self.domain.area()) / self.domain.area()).abs() > tol {
            return Err(Error::Topology(format!(
                "area {area} differs from domain area"
            )));
        }
        let coord = self.domain.min.norm().max(self.domain.max.norm());
        for (t, el) in self.elements.iter().enumerate() {
            let poly = self.element_polygon(t);
            if !is_simple(&poly) {
                return Err(Error::DegenerateElement {
                    element: t,
                    reason: "not simple".into(),
                });
            }
            // sum of omega * |E| n_E vanishes, and the divergence identity for tau(x) = x
            let (mut sx, mut sy, mut div) = (0.0, 0.0, 0.0);
            for (i, &e) in el.edges.iter().enumerate() {
                let edge = &self.edges[e];
                let (a, b) = self.edge_endpoints(e);
                let w = el.orientations[i] * edge.length;
                sx += w * edge.normal.x;
                sy += w * edge.normal.y;
                div += w * (0.5 * (a + b) - el.center).dot(edge.normal);
            }
            let scale = el.diameter;
            if sx.abs() > tol * scale || sy.abs() > tol * scale {
                return Err(Error::Topology(format!(
                    "element {t} boundary normals do not close"
                )));
            }
            // vertex coordinates carry absolute roundoff of order eps * |x|
            let floor = 16.0 * f64::EPSILON * coord * scale;
            if (div - 2.0 * el.area).abs() > tol * scale * scale + floor {
                return Err(Error::Topology(format!(
                    "element {t} fails the divergence identity"
                )));
            }
            if !crate::geometry::strictly_inside(&poly, el.center, 0.0) {
                return Err(Error::DegenerateElement {
                    element: t,
                    reason: "x_T not inside".into(),
                });
            }
        }
        for ie in &self.interface_edges {
            if self.elements[ie.int_element].region != Region::Int
                || self.elements[ie.ext_element].region != Region::Ext
            {
                return Err(Error::Topology(format!(
                    "interface edge {} mislabeled",
                    ie.edge
                )));
            }
        }
        Ok(())
    }

    fn vertex_elements(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for (t, el) in self.elements.iter().enumerate() {
            for &v in &el.vertices {
                adj[v].push(t);
            }
        }
        adj
    }

    fn vertex_min_edge(&self) -> Vec<f64> {
        let mut l = vec![f64::INFINITY; self.vertices.len()];
        for e in &self.edges {
            for &v in &e.vertices {
                l[v] = l[v].min(e.length);
            }
        }
        l
    }
}

/// Uniform `n x n` grid of squares on `domain`, all elements labeled exterior.
pub fn build_cartesian_mesh(n: usize, domain: BoundingBox) -> Result<FittedMesh> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let (vertices, vid) = grid_vertices(n, domain);
    let mut loops = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            loops.push(vec![
                vid(i, j),
                vid(i + 1, j),
                vid(i + 1, j + 1),
                vid(i, j + 1),
            ]);
        }
    }
    let regions = vec![Region::Ext; loops.len()];
    FittedMesh::from_polygons(domain, vertices, loops, regions, &HashSet::new())
}

/// Triangulation obtained by splitting each cell of a uniform grid along its diagonal.
///
/// The grid has `ceil(width / h_target)` cells per side.
pub fn build_triangular_mesh(h_target: f64, domain: BoundingBox) -> Result<FittedMesh> {
    if !(h_target > 0.0) {
        return Err(Error::InvalidInput("h_target must be positive".into()));
    }
    let n = ((domain.width().max(domain.height()) / h_target) - 1e-9)
        .ceil()
        .max(1.0) as usize;
    build_split_triangular_mesh(n, domain)
}

/// Triangulation of an `n x n` grid with every cell split into two triangles.
pub fn build_split_triangular_mesh(n: usize, domain: BoundingBox) -> Result<FittedMesh> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let (vertices, vid) = grid_vertices(n, domain);
    let mut loops = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            loops.push(vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)]);
            loops.push(vec![vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)]);
        }
    }
    let regions = vec![Region::Ext; loops.len()];
    FittedMesh::from_polygons(domain, vertices, loops, regions, &HashSet::new())
}

fn grid_vertices(n: usize, domain: BoundingBox) -> (Vec<Point>, impl Fn(usize, usize) -> usize) {
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let x = domain.min.x + domain.width() * i as f64 / n as f64;
            let y = domain.min.y + domain.height() * j as f64 / n as f64;
            vertices.push(Point::new(x, y));
        }
    }
    (vertices, move |i: usize, j: usize| j * (n + 1) + i)
}

/// Randomly displaces every vertex not on the boundary, the interface, or `extra_frozen`,
/// within a disc of radius `amplitude_factor` times the shortest adjacent edge.
pub fn perturb_vertices(
    mesh: &FittedMesh,
    amplitude_factor: f64,
    seed: u64,
    extra_frozen: &HashSet<usize>,
) -> Result<FittedMesh> {
    if !(0.0..0.5).contains(&amplitude_factor) {
        return Err(Error::InvalidInput(
            "amplitude factor must lie in [0, 1/2)".into(),
        ));
    }
    const MAX_RETRIES: usize = 100;
    let mut out = mesh.clone();
    if amplitude_factor == 0.0 {
        return Ok(out);
    }
    let mut frozen = mesh.boundary_vertices();
    frozen.extend(mesh.interface_vertices());
    frozen.extend(extra_frozen);
    let adj = mesh.vertex_elements();
    let len = mesh.vertex_min_edge();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in 0..out.vertices.len() {
        if frozen.contains(&v) {
            continue;
        }
        let origin = out.vertices[v];
        let radius = amplitude_factor * len[v];
        let mut accepted = false;
        for _ in 0..MAX_RETRIES {
            let r = radius * rng.random::<f64>().sqrt();
            let th = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            out.vertices[v] = origin + Point::new(r * th.cos(), r * th.sin());
            let ok = adj[v].iter().all(|&t| {
                let poly = out.element_polygon(t);
                signed_area(&poly) > 0.0 && is_simple(&poly)
            });
            if ok {
                accepted = true;
                break;
            }
        }
        if !accepted {
            return Err(Error::DegenerateElement {
                element: adj[v][0],
                reason: format!("could not displace vertex {v} without folding"),
            });
        }
    }
    out.rebuild_geometry()?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> BoundingBox {
        BoundingBox::new(Point::new(0., 0.), Point::new(1., 1.))
    }

    #[test]
    fn cartesian_counts() {
        let m = build_cartesian_mesh(1, unit()).unwrap();
        assert_eq!(
            (m.elements.len(), m.edges.len(), m.vertices.len()),
            (1, 4, 4)
        );
        assert!((m.total_area() - 1.0).abs() < 1e-15);
        let m = build_cartesian_mesh(2, BoundingBox::unit_centered()).unwrap();
        assert_eq!(
            (m.elements.len(), m.edges.len(), m.vertices.len()),
            (4, 12, 9)
        );
        let m = build_cartesian_mesh(8, BoundingBox::unit_centered()).unwrap();
        m.check_invariants(1e-12).unwrap();
        assert!(build_cartesian_mesh(0, unit()).is_err());
    }

    #[test]
    fn split_triangles() {
        let m = build_split_triangular_mesh(2, unit()).unwrap();
        assert_eq!(m.elements.len(), 8);
        assert!(m.edges.iter().all(|e| e.elements.len() <= 2));
        m.check_invariants(1e-12).unwrap();
    }

    #[test]
    fn triangular_refinement_halves_h() {
        let d = BoundingBox::unit_centered();
        let h1 = build_triangular_mesh(0.1, d).unwrap().h();
        let h2 = build_triangular_mesh(0.05, d).unwrap().h();
        let r = h1 / h2;
        assert!(r > 2.0 / 1.5 && r < 2.0 * 1.5, "ratio {r}");
    }

    #[test]
    fn perturbation() {
        let m = build_cartesian_mesh(8, BoundingBox::unit_centered()).unwrap();
        let same = perturb_vertices(&m, 0.0, 1, &HashSet::new()).unwrap();
        assert_eq!(same.vertices, m.vertices);
        let p1 = perturb_vertices(&m, 0.2, 7, &HashSet::new()).unwrap();
        let p2 = perturb_vertices(&m, 0.2, 7, &HashSet::new()).unwrap();
        assert_eq!(p1.vertices, p2.vertices);
        p1.check_invariants(1e-12).unwrap();
        for v in m.boundary_vertices() {
            assert_eq!(p1.vertices[v], m.vertices[v]);
        }
        let moved = (0..m.vertices.len())
            .filter(|&v| p1.vertices[v] != m.vertices[v])
            .count();
        assert_eq!(moved, 7 * 7);
        for v in 0..m.vertices.len() {
            assert!(p1.vertices[v].dist(m.vertices[v]) <= 0.2 / 8.0 + 1e-15);
        }
    }
}
