//! Post-processing fields of a computed deformation.

use crate::energy::{first_form, Actuation, Mat32};
use crate::error::{Error, Result};
use crate::material::{metric_distance, MaterialProgram, TargetMetric};
use crate::mesh::Mesh;

fn gradient_on(mesh: &Mesh, y: &[[f64; 3]], t: usize) -> Mat32 {
    let e = mesh.elements[t];
    let g = mesh.shape_gradients(t);
    let mut f = [[0.0; 2]; 3];
    for a in 0..3 {
        for (i, row) in f.iter_mut().enumerate() {
            row[0] += y[e[a]][i] * g[a][0];
            row[1] += y[e[a]][i] * g[a][1];
        }
    }
    f
}

fn check(mesh: &Mesh, y: &[[f64; 3]], per_element: usize) -> Result<()> {
    if y.len() != mesh.num_vertices() {
        return Err(Error::invalid(format!(
            "deformation has {} nodes, mesh has {}",
            y.len(),
            mesh.num_vertices()
        )));
    }
    if per_element != mesh.num_elements() {
        return Err(Error::invalid("element data does not match the mesh"));
    }
    Ok(())
}

/// `e¹ = Σ_T |T| · |I(∇y|_T) − g_T|` with the entrywise l1 matrix norm,
/// together with the per-element values `|I − g|`.
pub fn metric_defect(mesh: &Mesh, y: &[[f64; 3]], target: &TargetMetric) -> Result<(f64, Vec<f64>)> {
    check(mesh, y, target.g.len())?;
    let field: Vec<f64> = (0..mesh.num_elements())
        .map(|t| metric_distance(&first_form(&gradient_on(mesh, y, t)), &target.g[t]))
        .collect();
    let total = field.iter().enumerate().map(|(t, d)| mesh.area(t) * d).sum();
    Ok((total, field))
}

/// Per-element entrywise l1 norm of the stress `P = ∂W_str/∂F`.
pub fn stress_field(mesh: &Mesh, y: &[[f64; 3]], program: &MaterialProgram) -> Result<Vec<f64>> {
    let material = program.sample(mesh)?;
    check(mesh, y, material.len())?;
    (0..mesh.num_elements())
        .map(|t| {
            let act = Actuation::new(material.m[t], material.s[t], material.s0[t])?;
            let p = act.gradient(&gradient_on(mesh, y, t)).map_err(|e| match e {
                Error::Degenerate { det, cm, .. } => Error::Degenerate {
                    element: Some(t),
                    det,
                    cm,
                },
                other => other,
            })?;
            Ok(l1(&p))
        })
        .collect()
}

pub(crate) fn l1(p: &Mat32) -> f64 {
    p.iter().flatten().map(|v| v.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{interpolate, wstr_gradient};
    use crate::material::{lambda_of, target_metric, Director};
    use crate::mesh::{generate_square_mesh, DiagonalPattern, Rect};

    fn square() -> Mesh {
        generate_square_mesh(4, 4, Rect::UNIT, DiagonalPattern::Single).unwrap()
    }

    #[test]
    fn identity_embedding_defect() {
        let mesh = square();
        let (s, s0) = (0.1, 1.0);
        let prog = MaterialProgram::uniform(Director::Constant([1.0, 0.0]), s, s0).unwrap();
        let y = interpolate(&mesh, |p| [p[0], p[1], 0.0]);
        let (e, field) = metric_defect(&mesh, &y, &target_metric(&prog, &mesh).unwrap()).unwrap();
        let l = lambda_of(s, s0).unwrap();
        let expected = (1.0 - l * l).abs() + (1.0 - 1.0 / l).abs();
        assert!((e - expected).abs() < 1e-14);
        assert!(field.iter().all(|d| (d - expected).abs() < 1e-14));
    }

    #[test]
    fn stretched_affine_map_is_stress_free() {
        let mesh = square();
        let (s, s0) = (0.1, 1.0);
        let l = lambda_of(s, s0).unwrap();
        let prog = MaterialProgram::uniform(Director::Constant([1.0, 0.0]), s, s0).unwrap();
        let y = interpolate(&mesh, |p| [l * p[0], p[1] / l.sqrt(), 0.0]);
        let (e, _) = metric_defect(&mesh, &y, &target_metric(&prog, &mesh).unwrap()).unwrap();
        assert!(e < 1e-14);
        let stress = stress_field(&mesh, &y, &prog).unwrap();
        assert!(stress.iter().all(|&v| v < 1e-12), "{stress:?}");
    }

    #[test]
    fn stress_matches_density_gradient() {
        let mesh = square();
        let prog = MaterialProgram::uniform(Director::Constant([0.6, 0.8]), 0.3, 1.0).unwrap();
        let y = interpolate(&mesh, |p| [p[0] + 0.1 * p[1] * p[1], p[1], 0.2 * p[0] * p[1]]);
        let stress = stress_field(&mesh, &y, &prog).unwrap();
        for (t, &v) in stress.iter().enumerate() {
            let p = wstr_gradient(&gradient_on(&mesh, &y, t), [0.6, 0.8], 0.3, 1.0).unwrap();
            assert_eq!(v, l1(&p));
        }
    }
}
