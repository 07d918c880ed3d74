use super::geom::Point;
use super::Mesh;
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        x0: 0.0,
        y0: 0.0,
        x1: 1.0,
        y1: 1.0,
    };

    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }
}

/// How each structured cell is split into triangles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagonalPattern {
    /// One diagonal per cell, bottom-left to top-right.
    Single,
    /// Both diagonals with an added cell-center vertex (four triangles per cell).
    CrissCross,
    /// Diagonals pointing at the center of each of `tiles_x * tiles_y` tiles,
    /// so that tile diagonals are resolved by mesh edges.
    UnionJack { tiles_x: usize, tiles_y: usize },
}

/// Structured triangulation of `bounds` with `nx * ny` cells.
///
/// The reported `h` is the larger cell side, not the element diameter.
pub fn generate_square_mesh(
    nx: usize,
    ny: usize,
    bounds: Rect,
    pattern: DiagonalPattern,
) -> Result<Mesh> {
    if nx == 0 || ny == 0 {
        return Err(Error::invalid("subdivision counts must be positive"));
    }
    if !(bounds.x1 > bounds.x0 && bounds.y1 > bounds.y0) {
        return Err(Error::invalid("empty rectangle"));
    }
    if let DiagonalPattern::UnionJack { tiles_x, tiles_y } = pattern {
        if tiles_x == 0 || tiles_y == 0 || nx % (2 * tiles_x) != 0 || ny % (2 * tiles_y) != 0 {
            return Err(Error::invalid(
                "union-jack pattern needs an even number of cells per tile",
            ));
        }
    }
    let dx = (bounds.x1 - bounds.x0) / nx as f64;
    let dy = (bounds.y1 - bounds.y0) / ny as f64;
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            // Pin the far edges exactly to the bounds.
            let x = if i == nx { bounds.x1 } else { bounds.x0 + i as f64 * dx };
            let y = if j == ny { bounds.y1 } else { bounds.y0 + j as f64 * dy };
            vertices.push([x, y]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut elements = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            let rising = match pattern {
                DiagonalPattern::Single => true,
                DiagonalPattern::UnionJack { tiles_x, tiles_y } => {
                    let (cx, cy) = (nx / tiles_x, ny / tiles_y);
                    // Offsets of the cell from its tile center, in half-cells.
                    let ox = 2 * (i % cx) as i64 + 1 - cx as i64;
                    let oy = 2 * (j % cy) as i64 + 1 - cy as i64;
                    ox * oy > 0
                }
                DiagonalPattern::CrissCross => {
                    let m = vertices.len();
                    vertices.push([
                        bounds.x0 + (i as f64 + 0.5) * dx,
                        bounds.y0 + (j as f64 + 0.5) * dy,
                    ]);
                    elements.extend_from_slice(&[[a, b, m], [b, c, m], [c, d, m], [d, a, m]]);
                    continue;
                }
            };
            if rising {
                elements.push([a, b, c]);
                elements.push([a, c, d]);
            } else {
                elements.push([a, b, d]);
                elements.push([b, c, d]);
            }
        }
    }
    Mesh::new(vertices, elements, dx.max(dy))
}

/// Unit disc from a hexagon fan refined `level` times; new boundary points
/// are projected onto the circle. The origin is always vertex 0.
pub fn generate_disc_mesh(level: usize) -> Result<Mesh> {
    let mut vertices: Vec<Point> = vec![[0.0, 0.0]];
    for k in 0..6 {
        let a = std::f64::consts::FRAC_PI_3 * k as f64;
        vertices.push([a.cos(), a.sin()]);
    }
    let mut elements: Vec<[usize; 3]> = (0..6).map(|k| [0, 1 + k, 1 + (k + 1) % 6]).collect();
    for _ in 0..level {
        let mut count: HashMap<(usize, usize), u32> = HashMap::new();
        for e in &elements {
            for k in 0..3 {
                let (a, b) = (e[k], e[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut refined = Vec::with_capacity(4 * elements.len());
        for e in &elements {
            let mut m = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (e[k], e[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                m[k] = *mids.entry(key).or_insert_with(|| {
                    let (pa, pb) = (vertices[a], vertices[b]);
                    let mut p = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
                    if count[&key] == 1 {
                        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                        p = [p[0] / r, p[1] / r];
                    }
                    vertices.push(p);
                    vertices.len() - 1
                });
            }
            refined.push([e[0], m[0], m[2]]);
            refined.push([m[0], e[1], m[1]]);
            refined.push([m[2], m[1], e[2]]);
            refined.push([m[0], m[1], m[2]]);
        }
        elements = refined;
    }
    Mesh::new(vertices, elements, 0.5f64.powi(level as i32))
}

/// Corners of the folding-cube rhombus in counterclockwise order.
pub const RHOMBUS: [Point; 4] = [
    [0.0, 1.0],
    [1.732_050_807_568_877_2, 0.0],
    [1.732_050_807_568_877_2, 1.0],
    [0.0, 2.0],
];

/// Rhombus mesh obtained as the affine image of an `n x n` structured square.
pub fn generate_rhombus_mesh(n: usize) -> Result<Mesh> {
    let square = generate_square_mesh(n, n, Rect::UNIT, DiagonalPattern::Single)?;
    let [a, d, _, b] = RHOMBUS;
    let e1 = [d[0] - a[0], d[1] - a[1]];
    let e2 = [b[0] - a[0], b[1] - a[1]];
    let vertices = square
        .vertices
        .iter()
        .map(|&[u, v]| [a[0] + u * e1[0] + v * e2[0], a[1] + u * e1[1] + v * e2[1]])
        .collect();
    let h = 2.0 / n as f64;
    Mesh::new(vertices, square.elements, h)
}

const LATTICE_SIDE: f64 = 0.577_350_269_189_625_8; // 1/sqrt(3)

/// Physical position of the triangular-lattice point `p e1 + q e2`, where
/// `e1 = (a, 0)`, `e2 = (a/2, 1/2)` and `a = 1/sqrt(3)`.
pub fn rhombus_lattice_point(p: f64, q: f64) -> Point {
    [LATTICE_SIDE * (p + 0.5 * q), 0.5 * q]
}

/// Rhombus mesh built from the equilateral lattice with side `a/k`, clipped
/// to the rhombus. The rhombus sides are not lattice lines; clipped lattice
/// triangles are halved through an edge midpoint. Every lattice line of the
/// coarse lattice (the cube crease pattern) is resolved for any `k`.
pub fn generate_rhombus_lattice_mesh(k: usize) -> Result<Mesh> {
    if k == 0 {
        return Err(Error::invalid("lattice refinement must be positive"));
    }
    let k = k as i64;
    // Half-lattice integer coordinates: lattice point (P, Q) is (2P, 2Q).
    let corners: [[i64; 2]; 4] = [[-2 * k, 4 * k], [6 * k, 0], [4 * k, 4 * k], [-4 * k, 8 * k]];
    let side = |c: usize, p: [i64; 2]| -> i64 {
        let (a, b) = (corners[c], corners[(c + 1) % 4]);
        (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    };
    let mut tris: Vec<[[i64; 2]; 3]> = Vec::new();
    for q in 0..4 * k {
        for p in -3 * k..3 * k + 1 {
            let v = |dp: i64, dq: i64| [2 * (p + dp), 2 * (q + dq)];
            tris.push([v(0, 0), v(1, 0), v(0, 1)]);
            tris.push([v(1, 0), v(1, 1), v(0, 1)]);
        }
    }
    for c in 0..4 {
        let mut kept = Vec::with_capacity(tris.len());
        for t in tris {
            let s = [side(c, t[0]), side(c, t[1]), side(c, t[2])];
            if s.iter().all(|&x| x >= 0) {
                kept.push(t);
                continue;
            }
            if s.iter().all(|&x| x <= 0) {
                continue;
            }
            let Some(z) = (0..3).find(|&i| s[i] == 0) else {
                return Err(Error::invalid("rhombus boundary does not pass through lattice nodes"));
            };
            let (i, j) = ((z + 1) % 3, (z + 2) % 3);
            let sum = [t[i][0] + t[j][0], t[i][1] + t[j][1]];
            if sum[0] % 2 != 0 || sum[1] % 2 != 0 {
                return Err(Error::invalid("rhombus clip needs a second-level midpoint"));
            }
            let mid = [sum[0] / 2, sum[1] / 2];
            let mut out = t;
            if s[i] < 0 {
                out[i] = mid;
            } else {
                out[j] = mid;
            }
            kept.push(out);
        }
        tris = kept;
    }
    let scale = 1.0 / (2 * k) as f64;
    let mut index: HashMap<[i64; 2], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut elements = Vec::with_capacity(tris.len());
    for t in &tris {
        let mut e = [0usize; 3];
        for (slot, key) in e.iter_mut().zip(t.iter()) {
            *slot = *index.entry(*key).or_insert_with(|| {
                vertices.push(rhombus_lattice_point(key[0] as f64 * scale, key[1] as f64 * scale));
                vertices.len() - 1
            });
        }
        elements.push(e);
    }
    Mesh::new(vertices, elements, LATTICE_SIDE / k as f64)
}
