//! Legacy ASCII VTK unstructured grids and Wavefront OBJ surfaces.
//!
//! VTK layout, in order: header, `POINTS` (deformed positions), `CELLS`,
//! `CELL_TYPES` (all 5, triangles), then `CELL_DATA` with the scalar arrays
//! followed by the integer arrays in the order given, then `POINT_DATA` with
//! the vector arrays. Reals are written with 17 significant digits.

use crate::error::{Error, Result};
use crate::mesh::Mesh;
use std::io::{BufRead, Write};

/// Named arrays attached to an export.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VtkFields {
    pub cell_scalars: Vec<(String, Vec<f64>)>,
    pub cell_labels: Vec<(String, Vec<i64>)>,
    pub point_vectors: Vec<(String, Vec<[f64; 3]>)>,
}

/// Contents of a legacy VTK file as read back by [`read_vtk`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VtkFile {
    pub title: String,
    pub points: Vec<[f64; 3]>,
    pub cells: Vec<[usize; 3]>,
    /// Scalar cell arrays, integer ones converted to reals.
    pub cell_data: Vec<(String, Vec<f64>)>,
    pub point_data: Vec<(String, Vec<[f64; 3]>)>,
}

fn name_ok(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(Error::invalid(format!("VTK array name {name:?} must be a single word")));
    }
    Ok(())
}

/// Writes the deformed surface `y` over `mesh` with the given fields.
pub fn export_vtk<W: Write>(mut w: W, title: &str, mesh: &Mesh, y: &[[f64; 3]], fields: &VtkFields) -> Result<()> {
    let (nv, ne) = (mesh.num_vertices(), mesh.num_elements());
    if y.len() != nv {
        return Err(Error::invalid("deformation does not match the mesh"));
    }
    for (name, v) in &fields.cell_scalars {
        name_ok(name)?;
        if v.len() != ne {
            return Err(Error::invalid(format!("cell array {name} has {} values, expected {ne}", v.len())));
        }
    }
    for (name, v) in &fields.cell_labels {
        name_ok(name)?;
        if v.len() != ne {
            return Err(Error::invalid(format!("cell array {name} has {} values, expected {ne}", v.len())));
        }
    }
    for (name, v) in &fields.point_vectors {
        name_ok(name)?;
        if v.len() != nv {
            return Err(Error::invalid(format!("point array {name} has {} values, expected {nv}", v.len())));
        }
    }
    let title = title.lines().next().unwrap_or("").chars().take(255).collect::<String>();
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{title}")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {nv} double")?;
    for p in y {
        writeln!(w, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
    }
    writeln!(w, "CELLS {ne} {}", 4 * ne)?;
    for e in &mesh.elements {
        writeln!(w, "3 {} {} {}", e[0], e[1], e[2])?;
    }
    writeln!(w, "CELL_TYPES {ne}")?;
    for _ in 0..ne {
        writeln!(w, "5")?;
    }
    if !fields.cell_scalars.is_empty() || !fields.cell_labels.is_empty() {
        writeln!(w, "CELL_DATA {ne}")?;
        for (name, v) in &fields.cell_scalars {
            writeln!(w, "SCALARS {name} double 1")?;
            writeln!(w, "LOOKUP_TABLE default")?;
            for x in v {
                writeln!(w, "{x:.16e}")?;
            }
        }
        for (name, v) in &fields.cell_labels {
            writeln!(w, "SCALARS {name} int 1")?;
            writeln!(w, "LOOKUP_TABLE default")?;
            for x in v {
                writeln!(w, "{x}")?;
            }
        }
    }
    if !fields.point_vectors.is_empty() {
        writeln!(w, "POINT_DATA {nv}")?;
        for (name, v) in &fields.point_vectors {
            writeln!(w, "VECTORS {name} double")?;
            for p in v {
                writeln!(w, "{:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
            }
        }
    }
    Ok(())
}

struct Tokens<R> {
    reader: R,
    buf: Vec<String>,
    line: usize,
}

impl<R: BufRead> Tokens<R> {
    fn next(&mut self) -> Result<Option<String>> {
        while self.buf.is_empty() {
            let mut s = String::new();
            if self.reader.read_line(&mut s)? == 0 {
                return Ok(None);
            }
            self.line += 1;
            self.buf = s.split_whitespace().rev().map(str::to_string).collect();
        }
        Ok(self.buf.pop())
    }

    fn word(&mut self) -> Result<String> {
        self.next()?
            .ok_or_else(|| Error::invalid(format!("VTK file ends early at line {}", self.line)))
    }

    fn parse<T: std::str::FromStr>(&mut self) -> Result<T> {
        let w = self.word()?;
        w.parse()
            .map_err(|_| Error::invalid(format!("VTK line {}: cannot parse {w:?}", self.line)))
    }

    fn expect(&mut self, word: &str) -> Result<()> {
        let w = self.word()?;
        if w.eq_ignore_ascii_case(word) {
            Ok(())
        } else {
            Err(Error::invalid(format!("VTK line {}: expected {word}, found {w}", self.line)))
        }
    }
}

/// Reads files produced by [`export_vtk`].
pub fn read_vtk<R: BufRead>(mut r: R) -> Result<VtkFile> {
    let mut header = String::new();
    r.read_line(&mut header)?;
    if !header.starts_with("# vtk DataFile") {
        return Err(Error::invalid("not a legacy VTK file"));
    }
    let mut title = String::new();
    r.read_line(&mut title)?;
    let mut t = Tokens {
        reader: r,
        buf: Vec::new(),
        line: 2,
    };
    t.expect("ASCII")?;
    t.expect("DATASET")?;
    t.expect("UNSTRUCTURED_GRID")?;
    let mut out = VtkFile {
        title: title.trim_end_matches(['\n', '\r']).to_string(),
        ..Default::default()
    };
    let mut section = "";
    let mut count = 0usize;
    while let Some(word) = t.next()? {
        match word.as_str() {
            "POINTS" => {
                let n: usize = t.parse()?;
                t.word()?;
                out.points = (0..n)
                    .map(|_| Ok([t.parse()?, t.parse()?, t.parse()?]))
                    .collect::<Result<_>>()?;
            }
            "CELLS" => {
                let n: usize = t.parse()?;
                let _size: usize = t.parse()?;
                for _ in 0..n {
                    if t.parse::<usize>()? != 3 {
                        return Err(Error::invalid("only triangle cells are supported"));
                    }
                    out.cells.push([t.parse()?, t.parse()?, t.parse()?]);
                }
            }
            "CELL_TYPES" => {
                let n: usize = t.parse()?;
                for _ in 0..n {
                    if t.parse::<u32>()? != 5 {
                        return Err(Error::invalid("only triangle cells are supported"));
                    }
                }
            }
            "CELL_DATA" | "POINT_DATA" => {
                count = t.parse()?;
                section = if word == "CELL_DATA" { "cell" } else { "point" };
            }
            "SCALARS" => {
                let name = t.word()?;
                t.word()?;
                t.word()?;
                t.expect("LOOKUP_TABLE")?;
                t.word()?;
                let v = (0..count).map(|_| t.parse()).collect::<Result<Vec<f64>>>()?;
                if section == "cell" {
                    out.cell_data.push((name, v));
                } else {
                    return Err(Error::invalid("point scalars are not supported"));
                }
            }
            "VECTORS" => {
                let name = t.word()?;
                t.word()?;
                let v = (0..count)
                    .map(|_| Ok([t.parse()?, t.parse()?, t.parse()?]))
                    .collect::<Result<Vec<_>>>()?;
                if section == "point" {
                    out.point_data.push((name, v));
                } else {
                    return Err(Error::invalid("cell vectors are not supported"));
                }
            }
            other => {
                return Err(Error::invalid(format!("VTK line {}: unexpected keyword {other}", t.line)));
            }
        }
    }
    Ok(out)
}

/// Area-weighted vertex normals of the deformed surface, oriented by the
/// counterclockwise element order.
pub fn vertex_normals(mesh: &Mesh, y: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let mut n = vec![[0.0; 3]; mesh.num_vertices()];
    for e in &mesh.elements {
        let [a, b, c] = e.map(|v| y[v]);
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        let cr = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        for &k in e {
            for i in 0..3 {
                n[k][i] += cr[i];
            }
        }
    }
    for v in &mut n {
        let len = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if len > 0.0 {
            v.iter_mut().for_each(|x| *x /= len);
        }
    }
    n
}

/// Wavefront OBJ of the deformed surface with 1-based face indices.
pub fn export_obj<W: Write>(mut w: W, mesh: &Mesh, y: &[[f64; 3]], normals: bool) -> Result<()> {
    if y.len() != mesh.num_vertices() {
        return Err(Error::invalid("deformation does not match the mesh"));
    }
    for p in y {
        writeln!(w, "v {:.16e} {:.16e} {:.16e}", p[0], p[1], p[2])?;
    }
    if normals {
        for n in vertex_normals(mesh, y) {
            writeln!(w, "vn {:.16e} {:.16e} {:.16e}", n[0], n[1], n[2])?;
        }
        for e in &mesh.elements {
            let [a, b, c] = e.map(|v| v + 1);
            writeln!(w, "f {a}//{a} {b}//{b} {c}//{c}")?;
        }
    } else {
        for e in &mesh.elements {
            writeln!(w, "f {} {} {}", e[0] + 1, e[1] + 1, e[2] + 1)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_square_mesh, DiagonalPattern, Rect};

    fn two_triangles() -> (Mesh, Vec<[f64; 3]>) {
        let mesh = generate_square_mesh(1, 1, Rect::UNIT, DiagonalPattern::Single).unwrap();
        let y = mesh
            .vertices
            .iter()
            .map(|p| [p[0] + 0.1, p[1] / 3.0, std::f64::consts::PI * p[0] * p[1]])
            .collect();
        (mesh, y)
    }

    #[test]
    fn vtk_round_trip_is_exact() {
        let (mesh, y) = two_triangles();
        let fields = VtkFields {
            cell_scalars: vec![("metric_defect".into(), vec![1.0 / 3.0, 2e-300])],
            cell_labels: vec![("region".into(), vec![0, 7])],
            point_vectors: vec![("displacement".into(), y.iter().map(|p| [p[0], p[1], -p[2]]).collect())],
        };
        let mut buf = Vec::new();
        export_vtk(&mut buf, "two triangles", &mesh, &y, &fields).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("POINTS 4 double"));
        assert!(text.contains("CELLS 2 8"));
        let back = read_vtk(buf.as_slice()).unwrap();
        assert_eq!(back.title, "two triangles");
        assert_eq!(back.points, y);
        assert_eq!(back.cells, mesh.elements);
        assert_eq!(back.cell_data[0], fields.cell_scalars[0]);
        assert_eq!(back.cell_data[1].1, vec![0.0, 7.0]);
        assert_eq!(back.point_data, fields.point_vectors);
    }

    #[test]
    fn vtk_rejects_mismatched_arrays() {
        let (mesh, y) = two_triangles();
        let fields = VtkFields {
            cell_scalars: vec![("x".into(), vec![1.0])],
            ..Default::default()
        };
        assert!(export_vtk(Vec::new(), "t", &mesh, &y, &fields).is_err());
    }

    #[test]
    fn obj_indices_and_normals() {
        let (mesh, _) = two_triangles();
        let flat: Vec<[f64; 3]> = mesh.vertices.iter().map(|p| [p[0], p[1], 0.0]).collect();
        let mut buf = Vec::new();
        export_obj(&mut buf, &mesh, &flat, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 4);
        for l in text.lines().filter(|l| l.starts_with("vn ")) {
            let z: f64 = l.split_whitespace().nth(3).unwrap().parse().unwrap();
            assert_eq!(z, 1.0);
        }
        for l in text.lines().filter(|l| l.starts_with("f ")) {
            for tok in l.split_whitespace().skip(1) {
                let i: usize = tok.split("//").next().unwrap().parse().unwrap();
                assert!((1..=4).contains(&i));
            }
        }
    }
}
