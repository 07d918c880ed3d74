use super::Mesh;
use crate::error::{Error, Result};
use std::io::{BufRead, Write};

/// Writes `ntriangles nvertices`, then one `x y boundary_flag` line per
/// vertex and one `i j k` line (0-based) per triangle.
pub fn write_mesh_ascii<W: Write>(mesh: &Mesh, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", mesh.num_elements(), mesh.num_vertices())?;
    for (p, &b) in mesh.vertices.iter().zip(&mesh.boundary) {
        writeln!(w, "{:.17e} {:.17e} {}", p[0], p[1], u8::from(b))?;
    }
    for e in &mesh.elements {
        writeln!(w, "{} {} {}", e[0], e[1], e[2])?;
    }
    Ok(())
}

/// Reads the format of [`write_mesh_ascii`]. Blank lines and `#` comments
/// are skipped; the nominal `h` is set to the largest element diameter.
pub fn read_mesh_ascii<R: BufRead>(r: R) -> Result<Mesh> {
    let mut lines = r
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| match l {
            Ok(s) => {
                let t = s.trim();
                !t.is_empty() && !t.starts_with('#')
            }
            Err(_) => true,
        });
    let mut next = |what: &str| -> Result<(usize, Vec<String>)> {
        match lines.next() {
            Some((n, Ok(s))) => Ok((n, s.split_whitespace().map(str::to_owned).collect())),
            Some((_, Err(e))) => Err(e.into()),
            None => Err(Error::invalid(format!("mesh file ended before {what}"))),
        }
    };
    let (n, head) = next("header")?;
    let parse_usize = |n: usize, s: &str| -> Result<usize> {
        s.parse()
            .map_err(|_| Error::invalid(format!("line {n}: expected an index, found {s:?}")))
    };
    if head.len() != 2 {
        return Err(Error::invalid(format!("line {n}: header must be `ntriangles nvertices`")));
    }
    let nt = parse_usize(n, &head[0])?;
    let nv = parse_usize(n, &head[1])?;
    let mut vertices = Vec::with_capacity(nv);
    let mut boundary = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, f) = next("all vertices")?;
        if f.len() != 3 {
            return Err(Error::invalid(format!("line {n}: expected `x y boundary_flag`")));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse()
                .map_err(|_| Error::invalid(format!("line {n}: bad coordinate {s:?}")))
        };
        vertices.push([num(&f[0])?, num(&f[1])?]);
        boundary.push(parse_usize(n, &f[2])? != 0);
    }
    let mut elements = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (n, f) = next("all triangles")?;
        if f.len() != 3 {
            return Err(Error::invalid(format!("line {n}: expected `i j k`")));
        }
        elements.push([parse_usize(n, &f[0])?, parse_usize(n, &f[1])?, parse_usize(n, &f[2])?]);
    }
    let mut mesh = Mesh::with_boundary(vertices, elements, boundary, 1.0)?;
    mesh.h = mesh.max_diameter();
    Ok(mesh)
}
