use super::crease::Segment;
use super::geom::{self, Point};
use super::Mesh;
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Region predicate that holds for triangles within `width` of any segment.
pub fn near_segments(segments: &[Segment], width: f64) -> impl Fn(&[Point; 3]) -> bool + '_ {
    move |t: &[Point; 3]| {
        segments
            .iter()
            .any(|s| geom::segment_triangle_distance(s[0], s[1], t) <= width)
    }
}

/// Refines elements meeting `region` by longest-edge bisection until their
/// diameter is at most `target_h`, with conforming closure.
///
/// Segments that were resolved by the input mesh stay resolved, since every
/// bisection point lies on the split edge.
pub fn grade_near(mesh: &Mesh, region: &dyn Fn(&[Point; 3]) -> bool, target_h: f64) -> Result<Mesh> {
    if !(target_h > 0.0) {
        return Err(Error::invalid("target size must be positive"));
    }
    let mut vertices = mesh.vertices.clone();
    let mut elements = mesh.elements.clone();
    let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
    let tri = |v: &[Point], e: &[usize; 3]| [v[e[0]], v[e[1]], v[e[2]]];
    loop {
        let marked: Vec<bool> = elements
            .iter()
            .map(|e| {
                let t = tri(&vertices, e);
                geom::diameter(&t) > target_h * (1.0 + 1e-12) && region(&t)
            })
            .collect();
        if !marked.iter().any(|&m| m) {
            break;
        }
        let mut force = marked;
        loop {
            let mut changed = false;
            let mut next = Vec::with_capacity(elements.len() + 16);
            for (t, e) in elements.iter().enumerate() {
                let hanging = (0..3).any(|k| {
                    let (a, b) = (e[k], e[(k + 1) % 3]);
                    mids.contains_key(&(a.min(b), a.max(b)))
                });
                if force[t] || hanging {
                    changed = true;
                    let [c0, c1] = bisect(e, &mut vertices, &mut mids);
                    next.push(c0);
                    next.push(c1);
                } else {
                    next.push(*e);
                }
            }
            elements = next;
            if !changed {
                break;
            }
            force = vec![false; elements.len()];
        }
    }
    Mesh::new(vertices, elements, mesh.h)
}

fn bisect(
    e: &[usize; 3],
    vertices: &mut Vec<Point>,
    mids: &mut HashMap<(usize, usize), usize>,
) -> [[usize; 3]; 2] {
    // Longest edge; exact ties go to the smallest vertex pair.
    let mut best = 0;
    let mut best_key = (f64::NEG_INFINITY, usize::MAX, usize::MAX);
    for k in 0..3 {
        let (a, b) = (e[k], e[(k + 1) % 3]);
        let l = geom::dist(vertices[a], vertices[b]);
        let key = (l, a.min(b), a.max(b));
        if key.0 > best_key.0 || (key.0 == best_key.0 && (key.1, key.2) < (best_key.1, best_key.2)) {
            best = k;
            best_key = key;
        }
    }
    let (a, b, c) = (e[best], e[(best + 1) % 3], e[(best + 2) % 3]);
    let m = *mids.entry((a.min(b), a.max(b))).or_insert_with(|| {
        let (pa, pb) = (vertices[a], vertices[b]);
        vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
        vertices.len() - 1
    });
    [[a, m, c], [m, b, c]]
}
