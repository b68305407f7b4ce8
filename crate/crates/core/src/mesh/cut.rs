//! Cutting a background mesh along a closed polygonal chain.
//!
//! All background edges and chain segments are split at their mutual intersections
//! (including collinear overlaps), the resulting planar graph is rebuilt, and its bounded
//! faces become the elements of the fitted mesh. Each face is labeled by the winding number
//! of its interior point with respect to the chain.

use super::{FittedMesh, PolygonalChain, Region};
use crate::error::{Error, Result};
use crate::geometry::{signed_area, Point};
use std::collections::{HashMap, HashSet};

#[derive(Clone, Copy, Debug)]
pub struct CutOptions {
    /// Snap tolerance relative to the background mesh size.
    pub snap_ratio: f64,
    /// Return [`Error::DegenerateCut`] instead of recording degenerate cells in the diagnostics.
    pub fail_on_degenerate: bool,
}

impl Default for CutOptions {
    fn default() -> Self {
        Self {
            snap_ratio: 1e-10,
            fail_on_degenerate: false,
        }
    }
}

/// Point set with tolerance-based deduplication.
struct SnapSet {
    points: Vec<Point>,
    grid: HashMap<(i64, i64), Vec<usize>>,
    cell: f64,
    tol: f64,
}

impl SnapSet {
    fn new(tol: f64) -> Self {
        Self {
            points: Vec::new(),
            grid: HashMap::new(),
            cell: 4.0 * tol,
            tol,
        }
    }

    fn key(&self, p: Point) -> (i64, i64) {
        (
            (p.x / self.cell).floor() as i64,
            (p.y / self.cell).floor() as i64,
        )
    }

    fn find(&self, p: Point) -> Option<usize> {
        let (i, j) = self.key(p);
        let mut best: Option<(usize, f64)> = None;
        for di in -1..=1 {
            for dj in -1..=1 {
                if let Some(ids) = self.grid.get(&(i + di, j + dj)) {
                    for &id in ids {
                        let d = self.points[id].dist(p);
                        if d <= self.tol && best.is_none_or(|(_, bd)| d < bd) {
                            best = Some((id, d));
                        }
                    }
                }
            }
        }
        best.map(|(id, _)| id)
    }

    fn push_unchecked(&mut self, p: Point) -> usize {
        let id = self.points.len();
        self.points.push(p);
        let k = self.key(p);
        self.grid.entry(k).or_default().push(id);
        id
    }

    fn insert(&mut self, p: Point) -> usize {
        self.find(p).unwrap_or_else(|| self.push_unchecked(p))
    }
}

/// Uniform bucket grid over segment bounding boxes.
struct SegmentGrid {
    origin: Point,
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl SegmentGrid {
    fn new(origin: Point, cell: f64) -> Self {
        Self {
            origin,
            cell,
            buckets: HashMap::new(),
        }
    }

    fn range(&self, a: Point, b: Point, pad: f64) -> (i64, i64, i64, i64) {
        let f = |v: f64, o: f64| ((v - o) / self.cell).floor() as i64;
        (
            f(a.x.min(b.x) - pad, self.origin.x),
            f(a.x.max(b.x) + pad, self.origin.x),
            f(a.y.min(b.y) - pad, self.origin.y),
            f(a.y.max(b.y) + pad, self.origin.y),
        )
    }

    fn insert(&mut self, id: usize, a: Point, b: Point, pad: f64) {
        let (i0, i1, j0, j1) = self.range(a, b, pad);
        for i in i0..=i1 {
            for j in j0..=j1 {
                self.buckets.entry((i, j)).or_default().push(id);
            }
        }
    }

    fn query(&self, a: Point, b: Point, pad: f64) -> Vec<usize> {
        let (i0, i1, j0, j1) = self.range(a, b, pad);
        let mut out = Vec::new();
        for i in i0..=i1 {
            for j in j0..=j1 {
                if let Some(ids) = self.buckets.get(&(i, j)) {
                    out.extend_from_slice(ids);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

struct Segment {
    a: usize,
    b: usize,
    chain: bool,
    splits: Vec<usize>,
}

/// Splits the elements of `background` along `chain` and labels the pieces.
///
/// Intersection points closer than `snap_ratio * h` to an existing vertex are merged with it,
/// where `h` is the shortest background edge.
pub fn cut_mesh(
    background: &FittedMesh,
    chain: &PolygonalChain,
    options: CutOptions,
) -> Result<FittedMesh> {
    if !background.interface_edges.is_empty() {
        return Err(Error::InvalidInput(
            "background mesh already has an interface".into(),
        ));
    }
    let h_min = background
        .edges
        .iter()
        .map(|e| e.length)
        .fold(f64::INFINITY, f64::min);
    let h_mean =
        background.edges.iter().map(|e| e.length).sum::<f64>() / background.edges.len() as f64;
    let tol = options.snap_ratio * h_min;
    if !chain.inside(&background.domain, tol.max(1e-14)) {
        return Err(Error::Topology(
            "interface chain touches the domain boundary".into(),
        ));
    }

    let mut pts = SnapSet::new(tol);
    for &p in &background.vertices {
        pts.push_unchecked(p);
    }
    let mut segs: Vec<Segment> = background
        .edges
        .iter()
        .map(|e| Segment {
            a: e.vertices[0],
            b: e.vertices[1],
            chain: false,
            splits: Vec::new(),
        })
        .collect();
    let n_bg = segs.len();
    let chain_ids: Vec<usize> = chain.vertices.iter().map(|&p| pts.insert(p)).collect();
    for i in 0..chain_ids.len() {
        let (a, b) = (chain_ids[i], chain_ids[(i + 1) % chain_ids.len()]);
        if a == b {
            return Err(Error::Topology(
                "chain segment collapses under snapping".into(),
            ));
        }
        segs.push(Segment {
            a,
            b,
            chain: true,
            splits: Vec::new(),
        });
    }

    let mut grid = SegmentGrid::new(background.domain.min, h_mean.max(1e-12));
    for (s, seg) in segs.iter().enumerate().take(n_bg) {
        grid.insert(s, pts.points[seg.a], pts.points[seg.b], tol);
    }
    for c in n_bg..segs.len() {
        let (ca, cb) = (segs[c].a, segs[c].b);
        for s in grid.query(pts.points[ca], pts.points[cb], tol) {
            let (sa, sb) = (segs[s].a, segs[s].b);
            for (on_bg, on_chain) in intersect(&mut pts, [sa, sb], [ca, cb], tol) {
                if let Some(p) = on_bg {
                    segs[s].splits.push(p);
                }
                if let Some(p) = on_chain {
                    segs[c].splits.push(p);
                }
            }
        }
    }

    // split every segment at the points found on it
    let mut edge_set: HashMap<(usize, usize), bool> = HashMap::new();
    for seg in &segs {
        let (pa, pb) = (pts.points[seg.a], pts.points[seg.b]);
        let d = pb - pa;
        let mut ids = seg.splits.clone();
        ids.push(seg.a);
        ids.push(seg.b);
        ids.sort_unstable();
        ids.dedup();
        let mut along: Vec<(f64, usize)> = ids
            .iter()
            .map(|&i| ((pts.points[i] - pa).dot(d), i))
            .collect();
        along.sort_by(|x, y| x.0.total_cmp(&y.0));
        for w in along.windows(2) {
            let (u, v) = (w[0].1, w[1].1);
            if u != v {
                let key = (u.min(v), u.max(v));
                let flag = edge_set.entry(key).or_insert(false);
                *flag |= seg.chain;
            }
        }
    }

    let vertices = pts.points;
    let faces = extract_faces(&vertices, &edge_set)?;
    let chain_poly: Vec<Point> = chain_ids.iter().map(|&i| vertices[i]).collect();
    let chain_poly = PolygonalChain {
        vertices: chain_poly,
    };

    let mut loops = Vec::with_capacity(faces.len());
    let mut regions = Vec::with_capacity(faces.len());
    for f in faces {
        let poly: Vec<Point> = f.iter().map(|&v| vertices[v]).collect();
        let x = crate::geometry::interior_point(&poly);
        regions.push(if chain_poly.contains(x) {
            Region::Int
        } else {
            Region::Ext
        });
        loops.push(f);
    }
    let interface: HashSet<(usize, usize)> = edge_set
        .iter()
        .filter(|(_, &c)| c)
        .map(|(&k, _)| k)
        .collect();

    // drop unused vertices (none expected) by remapping through the loops
    let mut used = vec![usize::MAX; vertices.len()];
    let mut new_vertices = Vec::with_capacity(vertices.len());
    for l in loops.iter_mut() {
        for v in l.iter_mut() {
            if used[*v] == usize::MAX {
                used[*v] = new_vertices.len();
                new_vertices.push(vertices[*v]);
            }
            *v = used[*v];
        }
    }
    let interface = interface.into_iter().map(|(a, b)| {
        let (a, b) = (used[a], used[b]);
        (a.min(b), a.max(b))
    });
    let interface: HashSet<(usize, usize)> = interface.collect();

    let mesh =
        FittedMesh::from_polygons(background.domain, new_vertices, loops, regions, &interface)?;
    if options.fail_on_degenerate {
        if let Some(&t) = mesh.diagnostics.degenerate_cells.first() {
            let el = &mesh.elements[t];
            return Err(Error::DegenerateCut {
                element: t,
                area: el.area,
                threshold: super::DEGENERATE_AREA_RATIO * el.diameter * el.diameter,
            });
        }
    }
    Ok(mesh)
}

/// Intersections of background segment `s` with chain segment `c`.
///
/// Each entry gives the point id to insert in the split list of `s` and of `c` respectively.
fn intersect(
    pts: &mut SnapSet,
    s: [usize; 2],
    c: [usize; 2],
    tol: f64,
) -> Vec<(Option<usize>, Option<usize>)> {
    let (p0, p1) = (pts.points[s[0]], pts.points[s[1]]);
    let (q0, q1) = (pts.points[c[0]], pts.points[c[1]]);
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let l1 = d1.norm();
    let l2 = d2.norm();
    let den = d1.cross(d2);
    let mut out = Vec::new();
    let on_segment =
        |x: Point, a: Point, b: Point| crate::geometry::point_segment_distance(x, a, b) <= tol;
    if den.abs() <= 1e-12 * l1 * l2 {
        // parallel: only collinear overlaps matter
        if (q0 - p0).cross(d1).abs() / l1 > tol {
            return out;
        }
        for &qi in &c {
            if on_segment(pts.points[qi], p0, p1) {
                out.push((Some(qi), None));
            }
        }
        for &pi in &s {
            if on_segment(pts.points[pi], q0, q1) {
                out.push((None, Some(pi)));
            }
        }
        return out;
    }
    let t = (q0 - p0).cross(d2) / den;
    let u = (q0 - p0).cross(d1) / den;
    let et = tol / l1;
    let eu = tol / l2;
    if t < -et || t > 1.0 + et || u < -eu || u > 1.0 + eu {
        return out;
    }
    let x = p0 + t.clamp(0.0, 1.0) * d1;
    // prefer existing endpoints
    let id = [s[0], s[1], c[0], c[1]]
        .into_iter()
        .map(|i| (i, pts.points[i].dist(x)))
        .filter(|&(_, d)| d <= tol)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap_or_else(|| pts.insert(x));
    out.push((Some(id), Some(id)));
    out
}

/// Bounded faces of a planar straight-line graph as counter-clockwise vertex loops.
fn extract_faces(
    vertices: &[Point],
    edges: &HashMap<(usize, usize), bool>,
) -> Result<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<(f64, usize)>> = vec![Vec::new(); vertices.len()];
    for &(a, b) in edges.keys() {
        let d = vertices[b] - vertices[a];
        out[a].push((d.y.atan2(d.x), b));
        out[b].push(((-d.y).atan2(-d.x), a));
    }
    for o in out.iter_mut() {
        o.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    }
    let mut visited: HashSet<(usize, usize)> = HashSet::new();
    let mut faces = Vec::new();
    let mut outer = 0;
    let mut half_edges: Vec<(usize, usize)> =
        edges.keys().flat_map(|&(a, b)| [(a, b), (b, a)]).collect();
    half_edges.sort_unstable();
    for &start in &half_edges {
        if visited.contains(&start) {
            continue;
        }
        let mut face = Vec::new();
        let mut he = start;
        loop {
            visited.insert(he);
            face.push(he.0);
            let (u, v) = he;
            let list = &out[v];
            let pos = list.iter().position(|&(_, w)| w == u).unwrap();
            let next = list[(pos + list.len() - 1) % list.len()].1;
            he = (v, next);
            if he == start {
                break;
            }
            if face.len() > half_edges.len() {
                return Err(Error::Topology("face traversal did not close".into()));
            }
        }
        let poly: Vec<Point> = face.iter().map(|&v| vertices[v]).collect();
        if signed_area(&poly) > 0.0 {
            faces.push(face);
        } else {
            outer += 1;
        }
    }
    if outer != 1 {
        return Err(Error::Topology(format!(
            "cut produced {outer} unbounded boundary cycles; the chain must cross background edges"
        )));
    }
    Ok(faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::BoundingBox;
    use crate::mesh::{
        build_cartesian_mesh, build_split_triangular_mesh, build_triangular_mesh,
        discretize_interface, Circle, ParametricCurve, SquareLoop,
    };

    fn area_of(mesh: &FittedMesh, r: Region) -> f64 {
        mesh.elements
            .iter()
            .filter(|e| e.region == r)
            .map(|e| e.area)
            .sum()
    }

    #[test]
    fn vertical_split_of_unit_cells() {
        let d = BoundingBox::new(Point::new(0., 0.), Point::new(4., 4.));
        let bg = build_cartesian_mesh(4, d).unwrap();
        let chain = PolygonalChain::new(vec![
            Point::new(1.5, 1.0),
            Point::new(2.5, 1.0),
            Point::new(2.5, 3.0),
            Point::new(1.5, 3.0),
        ])
        .unwrap();
        let m = cut_mesh(&bg, &chain, CutOptions::default()).unwrap();
        m.check_invariants(1e-12).unwrap();
        assert!((area_of(&m, Region::Int) - 2.0).abs() < 1e-12);
        // cells crossed by x = 1.5 and x = 2.5 are split into two 1 x 1/2 rectangles
        let halves = m
            .elements
            .iter()
            .filter(|e| (e.area - 0.5).abs() < 1e-14)
            .count();
        assert_eq!(halves, 8);
        for ie in &m.interface_edges {
            let (a, b) = m.edge_endpoints(ie.edge);
            let mid = 0.5 * (a + b);
            let n = m.edges[ie.edge].normal;
            // normal points from the interior to the exterior
            assert!(!chain.contains(mid + 1e-3 * n) && chain.contains(mid - 1e-3 * n));
        }
    }

    #[test]
    fn triangle_corner_cut() {
        // the corner triangle of a split grid is cut by a diagonal chain segment
        let d = BoundingBox::new(Point::new(-1., -1.), Point::new(1., 1.));
        let bg = build_split_triangular_mesh(2, d).unwrap();
        let chain = PolygonalChain::new(vec![
            Point::new(-0.5, 0.0),
            Point::new(0.0, -0.5),
            Point::new(0.5, 0.0),
            Point::new(0.0, 0.5),
        ])
        .unwrap();
        let m = cut_mesh(&bg, &chain, CutOptions::default()).unwrap();
        m.check_invariants(1e-12).unwrap();
        assert!((area_of(&m, Region::Int) - 0.5).abs() < 1e-14);
        // triangle (0,-1),(1,0),(0,0) is split by the segment (0,-1/2)-(1/2,0)
        let mut areas: Vec<f64> = m.elements.iter().map(|e| e.area).collect();
        areas.sort_by(f64::total_cmp);
        assert!(areas.iter().any(|a| (a - 0.125).abs() < 1e-14));
        assert!(areas.iter().any(|a| (a - 0.375).abs() < 1e-14));
    }

    #[test]
    fn snapping_to_background_vertex() {
        let d = BoundingBox::new(Point::new(0., 0.), Point::new(4., 4.));
        let bg = build_cartesian_mesh(4, d).unwrap();
        let eps = 1e-13;
        let chain = PolygonalChain::new(vec![
            Point::new(1.0 + eps, 1.0 - eps),
            Point::new(2.5, 1.5),
            Point::new(2.5, 2.5),
            Point::new(1.5, 2.5),
        ])
        .unwrap();
        let m = cut_mesh(&bg, &chain, CutOptions::default()).unwrap();
        m.check_invariants(1e-12).unwrap();
        let min_edge = m
            .edges
            .iter()
            .map(|e| e.length)
            .fold(f64::INFINITY, f64::min);
        assert!(min_edge > 1e-6);
        assert_eq!(
            m.vertices
                .iter()
                .filter(|p| p.dist(Point::new(1., 1.)) < 1e-9)
                .count(),
            1
        );
    }

    #[test]
    fn square_interface_on_mesh_lines() {
        let bg = build_cartesian_mesh(8, BoundingBox::unit_centered()).unwrap();
        let s = SquareLoop {
            center: Point::default(),
            half: 0.25,
        };
        let chain = discretize_interface(&s, 0, 0.125).unwrap();
        let m = cut_mesh(&bg, &chain, CutOptions::default()).unwrap();
        assert_eq!(m.elements.len(), 64);
        assert_eq!(m.interface_edges.len(), 16);
        assert_eq!(m.interface_loop.len(), 16);
        assert!((area_of(&m, Region::Int) - 0.25).abs() < 1e-14);
        m.check_invariants(1e-12).unwrap();
    }

    #[test]
    fn circle_cut_classification_matches_level_set() {
        let c = Circle {
            center: Point::default(),
            radius: 0.25,
        };
        for (n, m_ratio) in [(8, 0), (8, 2), (16, 4)] {
            let bg = build_triangular_mesh(1.0 / n as f64, BoundingBox::unit_centered()).unwrap();
            let chain = discretize_interface(&c, m_ratio, bg.h()).unwrap();
            let m = cut_mesh(&bg, &chain, CutOptions::default()).unwrap();
            m.check_invariants(1e-12).unwrap();
            let poly_area = crate::geometry::signed_area(&chain.vertices).abs();
            assert!((area_of(&m, Region::Int) - poly_area).abs() < 1e-12);
            for el in &m.elements {
                // chain is inscribed: points between chord and arc are exterior
                if el.region == Region::Int {
                    assert!(c.contains(el.center));
                }
            }
            assert_eq!(m.interface_loop.len(), m.interface_edges.len());
        }
    }
}
