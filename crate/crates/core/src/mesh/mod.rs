//! Triangulations of the reference domain and their edge topology.
//!
//! A [`Mesh`] is a plain list of counterclockwise triangles. Interior-edge
//! adjacency lives in [`EdgeTopology`], crease tagging in [`CreaseSet`].

mod ascii;
mod crease;
mod cut;
mod delaunay;
mod generate;
pub mod geom;
mod refine;
mod topology;

pub use ascii::{read_mesh_ascii, write_mesh_ascii};
pub use crease::{fit_creases, CreaseSet, Segment};
pub use cut::slit;
pub use delaunay::generate_constrained_mesh;
pub use generate::{
    generate_disc_mesh, generate_rhombus_lattice_mesh, generate_rhombus_mesh,
    generate_square_mesh, rhombus_lattice_point, DiagonalPattern, Rect, RHOMBUS,
};
pub use refine::{grade_near, near_segments};
pub use topology::{build_edge_topology, EdgeTopology, InteriorEdge};

use crate::error::{Error, Result};
use geom::Point;
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Vertex triples in counterclockwise order.
    pub elements: Vec<[usize; 3]>,
    /// True for vertices on the domain boundary (including slit faces).
    pub boundary: Vec<bool>,
    /// Nominal mesh size used when reporting results.
    pub h: f64,
}

impl Mesh {
    /// Validates the connectivity and derives boundary flags from edge counts.
    pub fn new(vertices: Vec<Point>, elements: Vec<[usize; 3]>, h: f64) -> Result<Self> {
        let boundary = vec![false; vertices.len()];
        let mut mesh = Mesh {
            vertices,
            elements,
            boundary,
            h,
        };
        mesh.validate()?;
        mesh.boundary = mesh.boundary_flags();
        Ok(mesh)
    }

    /// Like [`Mesh::new`] but keeps caller-supplied boundary flags.
    pub fn with_boundary(
        vertices: Vec<Point>,
        elements: Vec<[usize; 3]>,
        boundary: Vec<bool>,
        h: f64,
    ) -> Result<Self> {
        if boundary.len() != vertices.len() {
            return Err(Error::invalid("boundary flag count differs from vertex count"));
        }
        let mesh = Mesh {
            vertices,
            elements,
            boundary,
            h,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    fn validate(&self) -> Result<()> {
        if self.elements.is_empty() {
            return Err(Error::invalid("mesh has no elements"));
        }
        let nv = self.vertices.len();
        for (t, e) in self.elements.iter().enumerate() {
            if e.iter().any(|&v| v >= nv) {
                return Err(Error::invalid(format!("element {t} references a missing vertex")));
            }
            let area = self.area(t);
            if !(area > 0.0) {
                return Err(Error::InvertedElement { element: t, area });
            }
        }
        Ok(())
    }

    fn boundary_flags(&self) -> Vec<bool> {
        let mut count: HashMap<(usize, usize), u32> = HashMap::with_capacity(3 * self.elements.len());
        for e in &self.elements {
            for k in 0..3 {
                let (a, b) = (e[k], e[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut flags = vec![false; self.vertices.len()];
        for (&(a, b), &c) in &count {
            if c == 1 {
                flags[a] = true;
                flags[b] = true;
            }
        }
        flags
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn triangle(&self, t: usize) -> [Point; 3] {
        let e = self.elements[t];
        [self.vertices[e[0]], self.vertices[e[1]], self.vertices[e[2]]]
    }

    pub fn area(&self, t: usize) -> f64 {
        geom::signed_area(&self.triangle(t))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_elements()).map(|t| self.area(t)).sum()
    }

    pub fn barycenter(&self, t: usize) -> Point {
        geom::centroid(&self.triangle(t))
    }

    pub fn diameter(&self, t: usize) -> f64 {
        geom::diameter(&self.triangle(t))
    }

    pub fn max_diameter(&self) -> f64 {
        (0..self.num_elements()).map(|t| self.diameter(t)).fold(0.0, f64::max)
    }

    pub fn min_diameter(&self) -> f64 {
        (0..self.num_elements())
            .map(|t| self.diameter(t))
            .fold(f64::INFINITY, f64::min)
    }

    /// Gradients of the three barycentric basis functions on element `t`.
    pub fn shape_gradients(&self, t: usize) -> [[f64; 2]; 3] {
        let [p0, p1, p2] = self.triangle(t);
        let twice = geom::orient(p0, p1, p2);
        let g = |a: Point, b: Point| [(a[1] - b[1]) / twice, (b[0] - a[0]) / twice];
        [g(p1, p2), g(p2, p0), g(p0, p1)]
    }
}

/// Maximum circumradius-to-inradius ratio over all elements.
pub fn shape_regularity(mesh: &Mesh) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in 0..mesh.num_elements() {
        let r = geom::radius_ratio(&mesh.triangle(t));
        if !r.is_finite() {
            return Err(Error::InvertedElement {
                element: t,
                area: mesh.area(t),
            });
        }
        worst = worst.max(r);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_clockwise_elements() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let err = Mesh::new(v, vec![[0, 2, 1]], 1.0).unwrap_err();
        assert!(matches!(err, Error::InvertedElement { element: 0, .. }));
    }

    #[test]
    fn shape_gradients_reproduce_linears() {
        let v = vec![[0.1, 0.2], [1.3, 0.1], [0.4, 0.9]];
        let m = Mesh::new(v.clone(), vec![[0, 1, 2]], 1.0).unwrap();
        let g = m.shape_gradients(0);
        // f(x) = 2x - 3y has gradient (2, -3)
        let f = |p: Point| 2.0 * p[0] - 3.0 * p[1];
        let mut grad = [0.0; 2];
        for a in 0..3 {
            grad[0] += f(v[a]) * g[a][0];
            grad[1] += f(v[a]) * g[a][1];
        }
        assert!((grad[0] - 2.0).abs() < 1e-13 && (grad[1] + 3.0).abs() < 1e-13);
    }
}
