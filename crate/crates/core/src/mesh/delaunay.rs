use super::crease::Segment;
use super::generate::Rect;
use super::Mesh;
use crate::error::{Error, Result};
use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

/// Quality triangulation of `bounds` whose edges resolve every segment.
///
/// Built by constrained Delaunay refinement with a 25° minimum angle and an
/// area cap matching equilateral triangles of side `h`. Segments may touch at
/// end points but must not cross.
pub fn generate_constrained_mesh(bounds: Rect, segments: &[Segment], h: f64) -> Result<Mesh> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid("mesh size must be positive"));
    }
    if !(bounds.x1 > bounds.x0 && bounds.y1 > bounds.y0) {
        return Err(Error::invalid("empty rectangle"));
    }
    let tol = 1e-12 * (bounds.x1 - bounds.x0).max(bounds.y1 - bounds.y0);
    let inside = |p: [f64; 2]| {
        p[0] >= bounds.x0 - tol && p[0] <= bounds.x1 + tol && p[1] >= bounds.y0 - tol && p[1] <= bounds.y1 + tol
    };
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::new();
    let insert = |cdt: &mut ConstrainedDelaunayTriangulation<Point2<f64>>, p: [f64; 2]| {
        cdt.insert(Point2::new(p[0], p[1]))
            .map_err(|e| Error::invalid(format!("cannot insert point {p:?}: {e:?}")))
    };
    let corners = [
        [bounds.x0, bounds.y0],
        [bounds.x1, bounds.y0],
        [bounds.x1, bounds.y1],
        [bounds.x0, bounds.y1],
    ];
    let handles = corners
        .iter()
        .map(|&c| insert(&mut cdt, c))
        .collect::<Result<Vec<_>>>()?;
    for k in 0..4 {
        cdt.add_constraint(handles[k], handles[(k + 1) % 4]);
    }
    for (index, s) in segments.iter().enumerate() {
        if !inside(s[0]) || !inside(s[1]) {
            return Err(Error::invalid(format!("segment {index} leaves the domain")));
        }
        let a = insert(&mut cdt, s[0])?;
        let b = insert(&mut cdt, s[1])?;
        if a == b {
            continue;
        }
        if !cdt.can_add_constraint(a, b) {
            return Err(Error::invalid(format!("segment {index} crosses another segment")));
        }
        cdt.add_constraint(a, b);
    }
    let params = RefinementParameters::<f64>::new()
        .with_angle_limit(AngleLimit::from_deg(25.0))
        .with_max_allowed_area(0.25 * 3f64.sqrt() * h * h)
        .with_max_additional_vertices(50_000_000);
    if !cdt.refine(params).refinement_complete {
        return Err(Error::invalid("constrained refinement did not complete"));
    }
    let vertices = cdt.vertices().map(|v| [v.position().x, v.position().y]).collect();
    let elements = cdt
        .inner_faces()
        .map(|f| f.vertices().map(|v| v.fix().index()))
        .collect();
    Mesh::new(vertices, elements, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_edge_topology, fit_creases, shape_regularity};

    #[test]
    fn resolves_slanted_segments() {
        let segs: Vec<Segment> = vec![[[0.1, 0.2], [0.8, 0.7]], [[0.8, 0.7], [0.3, 0.9]]];
        let m = generate_constrained_mesh(Rect::UNIT, &segs, 0.1).unwrap();
        assert!((m.total_area() - 1.0).abs() < 1e-12);
        assert!(m.max_diameter() < 0.25);
        assert!(shape_regularity(&m).unwrap() < 10.0);
        let topo = build_edge_topology(&m).unwrap();
        let creases = fit_creases(&m, &topo, &segs).unwrap();
        assert!(creases.edges.len() >= 2);
    }

    #[test]
    fn rejects_crossing_segments() {
        let segs: Vec<Segment> = vec![[[0.1, 0.1], [0.9, 0.9]], [[0.1, 0.9], [0.9, 0.1]]];
        assert!(generate_constrained_mesh(Rect::UNIT, &segs, 0.1).is_err());
    }
}
