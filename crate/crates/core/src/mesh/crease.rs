use super::geom::{self, Point};
use super::{EdgeTopology, Mesh};
use crate::error::{Error, Result};

/// A straight crease segment given by its endpoints.
pub type Segment = [Point; 2];

/// Crease edges plus the subdomain labelling they induce.
#[derive(Clone, Debug, PartialEq)]
pub struct CreaseSet {
    /// Indices into `EdgeTopology::edges`, sorted and unique.
    pub edges: Vec<usize>,
    /// Per interior edge: whether it lies on a crease.
    pub tagged: Vec<bool>,
    /// Per element: index of the connected component of the domain minus creases.
    pub labels: Vec<usize>,
    pub num_regions: usize,
}

impl CreaseSet {
    /// No creases; one region per connected component of the mesh.
    pub fn empty(mesh: &Mesh, topo: &EdgeTopology) -> Self {
        let tagged = vec![false; topo.num_interior()];
        let (labels, num_regions) = label_regions(mesh, topo, &tagged);
        CreaseSet {
            edges: Vec::new(),
            tagged,
            labels,
            num_regions,
        }
    }
}

/// Index of the mesh vertex within `tol` of `p`.
pub(crate) fn find_vertex(mesh: &Mesh, p: Point, tol: f64) -> Option<usize> {
    mesh.vertices
        .iter()
        .position(|&v| geom::dist(v, p) <= tol)
}

/// Vertex path along mesh edges from `seg[0]` to `seg[1]`, with the interior
/// edge index of each step (`None` for boundary edges).
pub(crate) fn trace_segment(
    mesh: &Mesh,
    neighbors: &[Vec<(usize, Option<usize>)>],
    seg: &Segment,
    index: usize,
) -> Result<(Vec<usize>, Vec<Option<usize>>)> {
    let unresolved = || Error::UnresolvedCrease {
        index,
        from: seg[0],
        to: seg[1],
    };
    let tol = 1e-10 * mesh.h;
    let start = find_vertex(mesh, seg[0], tol).ok_or_else(unresolved)?;
    let end = find_vertex(mesh, seg[1], tol).ok_or_else(unresolved)?;
    let dir = geom::sub(seg[1], seg[0]);
    let len = geom::norm(dir);
    if len <= tol {
        return Err(unresolved());
    }
    let param = |v: usize| geom::dot(geom::sub(mesh.vertices[v], seg[0]), dir) / (len * len);
    let mut path = vec![start];
    let mut steps = Vec::new();
    let mut cur = start;
    while cur != end {
        let t0 = param(cur);
        let next = neighbors[cur]
            .iter()
            .filter(|(w, _)| {
                let p = mesh.vertices[*w];
                let off = geom::cross(dir, geom::sub(p, seg[0])).abs() / len;
                let t = param(*w);
                off <= tol && t > t0 + tol / len && t <= 1.0 + tol / len
            })
            .min_by(|a, b| param(a.0).total_cmp(&param(b.0)));
        let Some(&(w, edge)) = next else {
            return Err(unresolved());
        };
        path.push(w);
        steps.push(edge);
        cur = w;
    }
    Ok((path, steps))
}

/// Tags the interior edges covering each segment and labels the regions of
/// the domain minus the creases by flood fill.
///
/// Segment endpoints must coincide with mesh vertices to `1e-10 * h`.
pub fn fit_creases(mesh: &Mesh, topo: &EdgeTopology, segments: &[Segment]) -> Result<CreaseSet> {
    let neighbors = topo.vertex_neighbors(mesh.num_vertices());
    let mut tagged = vec![false; topo.num_interior()];
    for (index, seg) in segments.iter().enumerate() {
        let (_, steps) = trace_segment(mesh, &neighbors, seg, index)?;
        for step in steps {
            match step {
                Some(e) => tagged[e] = true,
                None => {
                    return Err(Error::invalid(format!(
                        "crease segment {index} runs along the domain boundary"
                    )))
                }
            }
        }
    }
    let edges = (0..tagged.len()).filter(|&e| tagged[e]).collect();
    let (labels, num_regions) = label_regions(mesh, topo, &tagged);
    Ok(CreaseSet {
        edges,
        tagged,
        labels,
        num_regions,
    })
}

fn label_regions(mesh: &Mesh, topo: &EdgeTopology, tagged: &[bool]) -> (Vec<usize>, usize) {
    let nb = topo.element_neighbors(mesh.num_elements());
    let mut labels = vec![usize::MAX; mesh.num_elements()];
    let mut next = 0;
    let mut stack = Vec::new();
    for seed in 0..mesh.num_elements() {
        if labels[seed] != usize::MAX {
            continue;
        }
        labels[seed] = next;
        stack.push(seed);
        while let Some(t) = stack.pop() {
            for &(u, e) in &nb[t] {
                if !tagged[e] && labels[u] == usize::MAX {
                    labels[u] = next;
                    stack.push(u);
                }
            }
        }
        next += 1;
    }
    (labels, next)
}
