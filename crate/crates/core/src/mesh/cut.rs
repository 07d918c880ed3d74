use super::crease::{trace_segment, Segment};
use super::geom;
use super::{build_edge_topology, Mesh};
use crate::error::Result;
use std::collections::HashMap;

/// Opens a slit along each segment by duplicating the vertices strictly
/// inside it. Elements to the left of the segment direction receive the
/// copies, so the slit faces become boundary edges; the end points stay
/// shared.
pub fn slit(mesh: &Mesh, segments: &[Segment]) -> Result<Mesh> {
    let mut current = mesh.clone();
    for (index, seg) in segments.iter().enumerate() {
        let topo = build_edge_topology(&current)?;
        let neighbors = topo.vertex_neighbors(current.num_vertices());
        let (path, _) = trace_segment(&current, &neighbors, seg, index)?;
        if path.len() < 3 {
            continue;
        }
        let mut vertices = current.vertices.clone();
        let mut copy: HashMap<usize, usize> = HashMap::new();
        for &v in &path[1..path.len() - 1] {
            vertices.push(current.vertices[v]);
            copy.insert(v, vertices.len() - 1);
        }
        let dir = geom::sub(seg[1], seg[0]);
        let mut elements = current.elements.clone();
        for (t, e) in elements.iter_mut().enumerate() {
            if !e.iter().any(|v| copy.contains_key(v)) {
                continue;
            }
            let side = geom::cross(dir, geom::sub(current.barycenter(t), seg[0]));
            if side > 0.0 {
                for v in e.iter_mut() {
                    if let Some(&c) = copy.get(v) {
                        *v = c;
                    }
                }
            }
        }
        current = Mesh::new(vertices, elements, mesh.h)?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_square_mesh, DiagonalPattern, Rect};

    #[test]
    fn slit_adds_boundary() {
        let m = generate_square_mesh(4, 4, Rect::UNIT, DiagonalPattern::Single).unwrap();
        let s = slit(&m, &[[[0.25, 0.5], [0.75, 0.5]]]).unwrap();
        assert_eq!(s.num_vertices(), m.num_vertices() + 1);
        let topo = build_edge_topology(&s).unwrap();
        let before = build_edge_topology(&m).unwrap();
        assert_eq!(topo.boundary_edges.len(), before.boundary_edges.len() + 4);
        assert!((s.total_area() - 1.0).abs() < 1e-14);
    }
}
