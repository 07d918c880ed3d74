use super::geom::{self, Point};
use super::Mesh;
use crate::error::{Error, Result};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq)]
pub struct InteriorEdge {
    /// Endpoints with `vertices[0] < vertices[1]`.
    pub vertices: [usize; 2],
    /// Adjacent elements with `elements[0] < elements[1]`.
    pub elements: [usize; 2],
    pub length: f64,
    /// Unit normal pointing from `elements[0]` into `elements[1]`.
    pub normal: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeTopology {
    /// Interior edges sorted by endpoint pair.
    pub edges: Vec<InteriorEdge>,
    /// Boundary edges, oriented as in their element.
    pub boundary_edges: Vec<[usize; 2]>,
}

impl EdgeTopology {
    pub fn num_interior(&self) -> usize {
        self.edges.len()
    }

    /// Element neighbours across interior edges, as `(element, edge index)`.
    pub fn element_neighbors(&self, num_elements: usize) -> Vec<Vec<(usize, usize)>> {
        let mut nb = vec![Vec::new(); num_elements];
        for (i, e) in self.edges.iter().enumerate() {
            nb[e.elements[0]].push((e.elements[1], i));
            nb[e.elements[1]].push((e.elements[0], i));
        }
        nb
    }

    /// Vertex neighbours over all mesh edges, as `(vertex, interior edge index)`.
    pub fn vertex_neighbors(&self, num_vertices: usize) -> Vec<Vec<(usize, Option<usize>)>> {
        let mut nb = vec![Vec::new(); num_vertices];
        for (i, e) in self.edges.iter().enumerate() {
            let [a, b] = e.vertices;
            nb[a].push((b, Some(i)));
            nb[b].push((a, Some(i)));
        }
        for &[a, b] in &self.boundary_edges {
            nb[a].push((b, None));
            nb[b].push((a, None));
        }
        nb
    }
}

/// Lists every interior edge once with both neighbours.
///
/// Fails on edges shared by more than two elements, on inconsistently
/// oriented neighbours and on hanging vertices.
pub fn build_edge_topology(mesh: &Mesh) -> Result<EdgeTopology> {
    let mut half: Vec<(usize, usize, usize, bool)> = Vec::with_capacity(3 * mesh.num_elements());
    for (t, e) in mesh.elements.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (e[k], e[(k + 1) % 3]);
            half.push((a.min(b), a.max(b), t, a < b));
        }
    }
    half.sort_unstable();
    let mut edges = Vec::new();
    let mut boundary_edges = Vec::new();
    let mut i = 0;
    while i < half.len() {
        let mut j = i + 1;
        while j < half.len() && half[j].0 == half[i].0 && half[j].1 == half[i].1 {
            j += 1;
        }
        let (a, b) = (half[i].0, half[i].1);
        match j - i {
            1 => {
                let forward = half[i].3;
                boundary_edges.push(if forward { [a, b] } else { [b, a] });
            }
            2 => {
                if half[i].3 == half[i + 1].3 {
                    return Err(Error::NonConforming(format!(
                        "elements {} and {} traverse edge ({a}, {b}) in the same direction",
                        half[i].2,
                        half[i + 1].2
                    )));
                }
                let (t0, t1) = (half[i].2, half[i + 1].2);
                let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
                let length = geom::dist(pa, pb);
                let t = geom::sub(pb, pa);
                let mut normal = [t[1] / length, -t[0] / length];
                let toward = geom::sub(mesh.barycenter(t1), mesh.barycenter(t0));
                if geom::dot(normal, toward) < 0.0 {
                    normal = [-normal[0], -normal[1]];
                }
                edges.push(InteriorEdge {
                    vertices: [a, b],
                    elements: [t0, t1],
                    length,
                    normal,
                });
            }
            n => {
                return Err(Error::NonConforming(format!(
                    "edge ({a}, {b}) is shared by {n} elements"
                )))
            }
        }
        i = j;
    }
    check_hanging_vertices(mesh, &boundary_edges)?;
    Ok(EdgeTopology {
        edges,
        boundary_edges,
    })
}

/// A hanging vertex shows up as a boundary vertex lying strictly inside a
/// boundary edge; buckets keep the scan near-linear.
fn check_hanging_vertices(mesh: &Mesh, boundary_edges: &[[usize; 2]]) -> Result<()> {
    if boundary_edges.is_empty() {
        return Ok(());
    }
    let mut on_boundary = vec![false; mesh.num_vertices()];
    let mut longest: f64 = 0.0;
    for &[a, b] in boundary_edges {
        on_boundary[a] = true;
        on_boundary[b] = true;
        longest = longest.max(geom::dist(mesh.vertices[a], mesh.vertices[b]));
    }
    let cell = longest.max(f64::MIN_POSITIVE);
    let key = |p: Point| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (v, _) in on_boundary.iter().enumerate().filter(|(_, &b)| b) {
        grid.entry(key(mesh.vertices[v])).or_default().push(v);
    }
    for &[a, b] in boundary_edges {
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        let len = geom::dist(pa, pb);
        let (ka, kb) = (key(pa), key(pb));
        for gx in ka.0.min(kb.0)..=ka.0.max(kb.0) {
            for gy in ka.1.min(kb.1)..=ka.1.max(kb.1) {
                for &v in grid.get(&(gx, gy)).map(Vec::as_slice).unwrap_or(&[]) {
                    if v == a || v == b {
                        continue;
                    }
                    let p = mesh.vertices[v];
                    let t = geom::dot(geom::sub(p, pa), geom::sub(pb, pa)) / (len * len);
                    if t > 1e-9 && t < 1.0 - 1e-9 && geom::point_segment_distance(p, pa, pb) < 1e-9 * len {
                        return Err(Error::NonConforming(format!(
                            "vertex {v} hangs on edge ({a}, {b})"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}
