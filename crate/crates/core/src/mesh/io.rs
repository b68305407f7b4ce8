//! Line-based text format for fitted meshes.
//!
//! ```text
//! POLYMESH 1
//! DOMAIN xmin ymin xmax ymax
//! VERTICES nv
//! x y                        (nv lines)
//! EDGES ne
//! v0 v1                      (ne lines)
//! ELEMENTS nt
//! region m e0 e1 ... e(m-1)  (nt lines; region is int|ext, edges in loop order)
//! INTERFACE ni
//! e t_int t_ext              (ni lines)
//! NODAL nn                   (optional)
//! region vertex value        (nn lines)
//! END
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Coordinates are written in shortest
//! round-trip form, so a written mesh reads back bit-identically.

use super::{FittedMesh, Region};
use crate::error::{Error, Result};
use crate::geometry::{BoundingBox, Point};
use std::collections::HashSet;
use std::fmt::Write as _;

/// Per-vertex values attached to a mesh dump (one entry per region-vertex pair).
pub type NodalValues = Vec<(Region, usize, f64)>;

pub fn write_polymesh(mesh: &FittedMesh, nodal: Option<&NodalValues>) -> String {
    let mut s = String::new();
    let d = &mesh.domain;
    writeln!(s, "POLYMESH 1").unwrap();
    writeln!(
        s,
        "DOMAIN {:e} {:e} {:e} {:e}",
        d.min.x, d.min.y, d.max.x, d.max.y
    )
    .unwrap();
    writeln!(s, "VERTICES {}", mesh.vertices.len()).unwrap();
    for p in &mesh.vertices {
        writeln!(s, "{:e} {:e}", p.x, p.y).unwrap();
    }
    writeln!(s, "EDGES {}", mesh.edges.len()).unwrap();
    for e in &mesh.edges {
        writeln!(s, "{} {}", e.vertices[0], e.vertices[1]).unwrap();
    }
    writeln!(s, "ELEMENTS {}", mesh.elements.len()).unwrap();
    for el in &mesh.elements {
        write!(s, "{} {}", el.region.label(), el.edges.len()).unwrap();
        for e in &el.edges {
            write!(s, " {e}").unwrap();
        }
        writeln!(s).unwrap();
    }
    writeln!(s, "INTERFACE {}", mesh.interface_edges.len()).unwrap();
    for ie in &mesh.interface_edges {
        writeln!(s, "{} {} {}", ie.edge, ie.int_element, ie.ext_element).unwrap();
    }
    if let Some(values) = nodal {
        writeln!(s, "NODAL {}", values.len()).unwrap();
        for (r, v, x) in values {
            writeln!(s, "{} {} {:e}", r.label(), v, x).unwrap();
        }
    }
    writeln!(s, "END").unwrap();
    s
}

struct Lines<'a> {
    inner: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate().peekable(),
            line: 0,
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    fn skip_blank(&mut self) {
        while let Some((_, l)) = self.inner.peek() {
            let t = l.trim();
            if t.is_empty() || t.starts_with('#') {
                self.inner.next();
            } else {
                break;
            }
        }
    }

    fn next_tokens(&mut self) -> Result<Vec<&'a str>> {
        self.skip_blank();
        let (i, l) = self
            .inner
            .next()
            .ok_or_else(|| self.err("unexpected end of input"))?;
        self.line = i + 1;
        Ok(l.split_whitespace().collect())
    }

    fn peek_keyword(&mut self) -> Option<&'a str> {
        self.skip_blank();
        self.inner
            .peek()
            .and_then(|(_, l)| l.split_whitespace().next())
    }

    fn header(&mut self, key: &str) -> Result<usize> {
        let t = self.next_tokens()?;
        if t.len() != 2 || t[0] != key {
            return Err(self.err(format!("expected `{key} <count>`")));
        }
        t[1].parse().map_err(|_| self.err("invalid count"))
    }

    fn num<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse()
            .map_err(|_| self.err(format!("invalid number `{s}`")))
    }
}

/// Parses a mesh (and optional nodal values) written by [`write_polymesh`].
pub fn read_polymesh(text: &str) -> Result<(FittedMesh, Option<NodalValues>)> {
    let mut r = Lines::new(text);
    let t = r.next_tokens()?;
    if t != ["POLYMESH", "1"] {
        return Err(r.err("expected header `POLYMESH 1`"));
    }
    let t = r.next_tokens()?;
    if t.len() != 5 || t[0] != "DOMAIN" {
        return Err(r.err("expected `DOMAIN xmin ymin xmax ymax`"));
    }
    let domain = BoundingBox::new(
        Point::new(r.num(t[1])?, r.num(t[2])?),
        Point::new(r.num(t[3])?, r.num(t[4])?),
    );
    let nv = r.header("VERTICES")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let t = r.next_tokens()?;
        if t.len() != 2 {
            return Err(r.err("expected `x y`"));
        }
        vertices.push(Point::new(r.num(t[0])?, r.num(t[1])?));
    }
    let ne = r.header("EDGES")?;
    let mut edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        let t = r.next_tokens()?;
        if t.len() != 2 {
            return Err(r.err("expected `v0 v1`"));
        }
        let (a, b): (usize, usize) = (r.num(t[0])?, r.num(t[1])?);
        if a >= nv || b >= nv {
            return Err(r.err("vertex index out of range"));
        }
        edges.push([a, b]);
    }
    let nt = r.header("ELEMENTS")?;
    let mut loops = Vec::with_capacity(nt);
    let mut regions = Vec::with_capacity(nt);
    for _ in 0..nt {
        let t = r.next_tokens()?;
        if t.len() < 2 {
            return Err(r.err("expected `region m e0 ...`"));
        }
        let region = Region::parse(t[0]).ok_or_else(|| r.err("region must be int or ext"))?;
        let m: usize = r.num(t[1])?;
        if t.len() != m + 2 {
            return Err(r.err("edge count mismatch"));
        }
        let es: Vec<usize> = t[2..].iter().map(|s| r.num(s)).collect::<Result<_>>()?;
        if es.iter().any(|&e| e >= ne) {
            return Err(r.err("edge index out of range"));
        }
        loops.push(
            loop_from_edges(&es, &edges).ok_or_else(|| r.err("edges do not form a closed loop"))?,
        );
        regions.push(region);
    }
    let ni = r.header("INTERFACE")?;
    let mut interface = HashSet::new();
    for _ in 0..ni {
        let t = r.next_tokens()?;
        if t.len() != 3 {
            return Err(r.err("expected `e t_int t_ext`"));
        }
        let e: usize = r.num(t[0])?;
        if e >= ne {
            return Err(r.err("edge index out of range"));
        }
        let [a, b] = edges[e];
        interface.insert((a.min(b), a.max(b)));
    }
    let mut nodal = None;
    if r.peek_keyword() == Some("NODAL") {
        let nn = r.header("NODAL")?;
        let mut values = Vec::with_capacity(nn);
        for _ in 0..nn {
            let t = r.next_tokens()?;
            if t.len() != 3 {
                return Err(r.err("expected `region vertex value`"));
            }
            let region = Region::parse(t[0]).ok_or_else(|| r.err("region must be int or ext"))?;
            values.push((region, r.num(t[1])?, r.num(t[2])?));
        }
        nodal = Some(values);
    }
    let t = r.next_tokens()?;
    if t != ["END"] {
        return Err(r.err("expected `END`"));
    }
    let mut mesh = FittedMesh::from_polygons(domain, vertices, loops, regions, &interface)?;
    // keep the stored edge numbering and orientation
    mesh = renumber_edges(mesh, &edges)?;
    Ok((mesh, nodal))
}

fn loop_from_edges(es: &[usize], edges: &[[usize; 2]]) -> Option<Vec<usize>> {
    let m = es.len();
    let [a0, b0] = edges[es[0]];
    let [a1, b1] = edges[es[(1) % m]];
    // start at the vertex of the first edge not shared with the second
    let mut cur = if a0 == a1 || a0 == b1 { b0 } else { a0 };
    let mut out = Vec::with_capacity(m);
    for &e in es {
        let [a, b] = edges[e];
        out.push(cur);
        cur = if a == cur {
            b
        } else if b == cur {
            a
        } else {
            return None;
        };
    }
    (cur == out[0]).then_some(out)
}

/// Maps the edges built by `from_polygons` back to the numbering of the file.
fn renumber_edges(mesh: FittedMesh, file_edges: &[[usize; 2]]) -> Result<FittedMesh> {
    use std::collections::HashMap;
    let index: HashMap<(usize, usize), usize> = file_edges
        .iter()
        .enumerate()
        .map(|(i, &[a, b])| ((a.min(b), a.max(b)), i))
        .collect();
    let mut perm = vec![0usize; mesh.edges.len()];
    for (e, edge) in mesh.edges.iter().enumerate() {
        let [a, b] = edge.vertices;
        perm[e] = *index
            .get(&(a.min(b), a.max(b)))
            .ok_or_else(|| Error::Topology("edge missing from file".into()))?;
    }
    if mesh.edges.len() != file_edges.len() {
        return Err(Error::Topology(
            "file lists edges not used by any element".into(),
        ));
    }
    let mut m = mesh;
    let mut edges = m.edges.clone();
    for (e, edge) in m.edges.iter().enumerate() {
        let mut edge = edge.clone();
        // interface edges keep the interior-to-exterior orientation
        if edge.kind != super::EdgeKind::Interface {
            edge.vertices = file_edges[perm[e]];
        }
        edges[perm[e]] = edge;
    }
    m.edges = edges;
    for el in m.elements.iter_mut() {
        for e in el.edges.iter_mut() {
            *e = perm[*e];
        }
    }
    for ie in m.interface_edges.iter_mut() {
        ie.edge = perm[ie.edge];
    }
    for e in m.boundary_edges.iter_mut() {
        *e = perm[*e];
    }
    m.rebuild_geometry()?;
    Ok(m)
}
