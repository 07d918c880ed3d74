//! Discrete energy `E_h = E_str + R_h` over continuous piecewise linear
//! deformations, with its exact gradient, Hessian and the H¹ Gram matrix.
//!
//! All per-element data is constant, so one-point quadrature is exact.
//! The jump penalty is deformation independent and is kept as a fixed
//! scalar quadratic form applied to each component.

mod density;
mod sparse;

pub use density::{
    extend_gradient, first_form, normal_extension, reference_strain, so3_distance,
    step_length_tensors, w3d_density, wstr_density, wstr_gradient, wstr_hessian, Actuation, Hess6,
    Mat3, Mat32, StepLengthTensors, EPS_DET,
};
pub use sparse::SymCsc;
pub(crate) use sparse::Pattern;

use crate::error::{Error, Result};
use crate::material::{ElementMaterial, MaterialProgram, RegularizationWeights};
use crate::mesh::geom::Point;
use crate::mesh::{CreaseSet, EdgeTopology, Mesh};

/// Nodal positions in R³, one per mesh vertex.
pub type Deformation = Vec<[f64; 3]>;

/// Nodal interpolant of `f`.
pub fn interpolate(mesh: &Mesh, f: impl Fn(Point) -> [f64; 3]) -> Deformation {
    mesh.vertices.iter().map(|&p| f(p)).collect()
}

/// The flat embedding `x ↦ (x, 0)`.
pub fn flat_embedding(mesh: &Mesh) -> Deformation {
    interpolate(mesh, |p| [p[0], p[1], 0.0])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport {
    pub stretching: f64,
    pub regularization: f64,
    pub total: f64,
}

/// Precomputed geometry, material data and sparsity for one problem.
#[derive(Clone, Debug)]
pub struct EnergyModel {
    mesh: Mesh,
    topology: EdgeTopology,
    material: ElementMaterial,
    actuation: Vec<Actuation>,
    areas: Vec<f64>,
    grads: Vec<[[f64; 2]; 3]>,
    weights: RegularizationWeights,
    pattern: Pattern,
    reg: Vec<f64>,
    h1: Vec<f64>,
}

fn tag_element(e: Error, t: usize) -> Error {
    match e {
        Error::Degenerate { det, cm, .. } => Error::Degenerate {
            element: Some(t),
            det,
            cm,
        },
        other => other,
    }
}

impl EnergyModel {
    pub fn new(
        mesh: Mesh,
        topology: EdgeTopology,
        material: ElementMaterial,
        weights: RegularizationWeights,
    ) -> Result<Self> {
        let ne = mesh.num_elements();
        if material.len() != ne {
            return Err(Error::invalid("material data does not match the mesh"));
        }
        if weights.weights.len() != topology.num_interior() {
            return Err(Error::invalid("regularization weights do not match the edge topology"));
        }
        let actuation = (0..ne)
            .map(|t| Actuation::new(material.m[t], material.s[t], material.s0[t]))
            .collect::<Result<Vec<_>>>()?;
        let areas: Vec<f64> = (0..ne).map(|t| mesh.area(t)).collect();
        let grads: Vec<_> = (0..ne).map(|t| mesh.shape_gradients(t)).collect();
        let pattern = Pattern::new(&mesh, Some(&topology));

        let mut h1 = vec![0.0; pattern.scalar_row_idx.len()];
        for (t, e) in mesh.elements.iter().enumerate() {
            let (area, g) = (areas[t], grads[t]);
            for a in 0..3 {
                for b in a..3 {
                    let mass = area / 12.0 * if a == b { 2.0 } else { 1.0 };
                    let stiff = area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                    h1[pattern.scalar_slot(e[a], e[b])] += mass + stiff;
                }
            }
        }

        let mut reg = vec![0.0; pattern.scalar_row_idx.len()];
        for (k, edge) in topology.edges.iter().enumerate() {
            let c = weights.weights[k];
            if c == 0.0 {
                continue;
            }
            let [t0, t1] = edge.elements;
            let mut d: Vec<(usize, [f64; 2])> = Vec::with_capacity(4);
            for (t, sign) in [(t0, 1.0), (t1, -1.0)] {
                for a in 0..3 {
                    let v = mesh.elements[t][a];
                    let g = [sign * grads[t][a][0], sign * grads[t][a][1]];
                    match d.iter_mut().find(|(w, _)| *w == v) {
                        Some((_, acc)) => {
                            acc[0] += g[0];
                            acc[1] += g[1];
                        }
                        None => d.push((v, g)),
                    }
                }
            }
            let scale = c * edge.length * edge.length;
            for (i, &(v, dv)) in d.iter().enumerate() {
                for &(w, dw) in &d[i..] {
                    reg[pattern.scalar_slot(v, w)] += scale * (dv[0] * dw[0] + dv[1] * dw[1]);
                }
            }
        }

        Ok(EnergyModel {
            mesh,
            topology,
            material,
            actuation,
            areas,
            grads,
            weights,
            pattern,
            reg,
            h1,
        })
    }

    /// Samples `program` and builds the model with weight `base_cr` off creases.
    pub fn from_program(
        mesh: Mesh,
        topology: EdgeTopology,
        creases: &CreaseSet,
        program: &MaterialProgram,
        base_cr: f64,
    ) -> Result<Self> {
        let material = program.sample(&mesh)?;
        let weights = crate::material::regularization_weights(&topology, creases, base_cr)?;
        Self::new(mesh, topology, material, weights)
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn topology(&self) -> &EdgeTopology {
        &self.topology
    }

    pub fn material(&self) -> &ElementMaterial {
        &self.material
    }

    pub fn weights(&self) -> &RegularizationWeights {
        &self.weights
    }

    pub fn num_dofs(&self) -> usize {
        3 * self.mesh.num_vertices()
    }

    pub fn nnz(&self) -> usize {
        self.pattern.nnz()
    }

    fn check_len(&self, y: &[f64]) -> Result<()> {
        if y.len() == self.num_dofs() {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "deformation has {} values, expected {}",
                y.len(),
                self.num_dofs()
            )))
        }
    }

    /// Elementwise constant gradient `∇y_h` on element `t`.
    pub fn deformation_gradient(&self, y: &[f64], t: usize) -> Mat32 {
        let e = self.mesh.elements[t];
        let g = &self.grads[t];
        let mut f = [[0.0; 2]; 3];
        for a in 0..3 {
            for i in 0..3 {
                let yi = y[3 * e[a] + i];
                f[i][0] += yi * g[a][0];
                f[i][1] += yi * g[a][1];
            }
        }
        f
    }

    pub fn stretching_energy(&self, y: &[f64]) -> Result<f64> {
        self.check_len(y)?;
        let mut acc = 0.0;
        for t in 0..self.mesh.num_elements() {
            let f = self.deformation_gradient(y, t);
            acc += self.areas[t] * self.actuation[t].density(&f).map_err(|e| tag_element(e, t))?;
        }
        Ok(acc)
    }

    /// Summed edge by edge from the jumps, which keeps it nonnegative where
    /// the equivalent quadratic form would suffer cancellation.
    pub fn regularization_energy(&self, y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (k, edge) in self.topology.edges.iter().enumerate() {
            let c = self.weights.weights[k];
            if c == 0.0 {
                continue;
            }
            let j = self.gradient_jump(y, k);
            let sq: f64 = j.iter().flatten().map(|v| v * v).sum();
            acc += c * edge.length * edge.length * sq;
        }
        acc
    }

    pub fn energy(&self, y: &[f64]) -> Result<EnergyReport> {
        let stretching = self.stretching_energy(y)?;
        let regularization = self.regularization_energy(y);
        Ok(EnergyReport {
            stretching,
            regularization,
            total: stretching + regularization,
        })
    }

    /// Per-element density values.
    pub fn density_field(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y)?;
        (0..self.mesh.num_elements())
            .map(|t| {
                let f = self.deformation_gradient(y, t);
                self.actuation[t].density(&f).map_err(|e| tag_element(e, t))
            })
            .collect()
    }

    /// Per-element `∂W/∂F`.
    pub fn stress(&self, y: &[f64]) -> Result<Vec<Mat32>> {
        self.check_len(y)?;
        (0..self.mesh.num_elements())
            .map(|t| {
                let f = self.deformation_gradient(y, t);
                self.actuation[t].gradient(&f).map_err(|e| tag_element(e, t))
            })
            .collect()
    }

    /// Gradient of `E_h` with respect to the interleaved nodal values.
    pub fn gradient(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y)?;
        let mut out = vec![0.0; self.num_dofs()];
        for t in 0..self.mesh.num_elements() {
            let f = self.deformation_gradient(y, t);
            let p = self.actuation[t].gradient(&f).map_err(|e| tag_element(e, t))?;
            let (area, g, e) = (self.areas[t], &self.grads[t], self.mesh.elements[t]);
            for a in 0..3 {
                for i in 0..3 {
                    out[3 * e[a] + i] += area * (p[i][0] * g[a][0] + p[i][1] * g[a][1]);
                }
            }
        }
        let mut by = vec![0.0; self.num_dofs()];
        self.pattern.scalar_mul(&self.reg, y, &mut by);
        for (o, b) in out.iter_mut().zip(by) {
            *o += 2.0 * b;
        }
        Ok(out)
    }

    /// Writes the upper-triangle values of `Hess E_h + shift·H1` into `values`.
    pub(crate) fn hessian_into(&self, y: &[f64], shift: f64, values: &mut [f64]) -> Result<()> {
        self.check_len(y)?;
        values.fill(0.0);
        for t in 0..self.mesh.num_elements() {
            let f = self.deformation_gradient(y, t);
            let h = self.actuation[t].hessian(&f).map_err(|e| tag_element(e, t))?;
            let (area, g) = (self.areas[t], &self.grads[t]);
            let slots = &self.pattern.element_slots[t];
            for p in 0..9 {
                let (a, i) = (p / 3, p % 3);
                for q in 0..9 {
                    let slot = slots[9 * p + q];
                    if slot == u32::MAX {
                        continue;
                    }
                    let (b, k) = (q / 3, q % 3);
                    let mut v = 0.0;
                    for j in 0..2 {
                        for l in 0..2 {
                            v += h[2 * i + j][2 * k + l] * g[a][j] * g[b][l];
                        }
                    }
                    values[slot as usize] += area * v;
                }
            }
        }
        for (k, slots) in self.pattern.scalar_slots.iter().enumerate() {
            let v = 2.0 * self.reg[k] + shift * self.h1[k];
            for &s in slots {
                values[s as usize] += v;
            }
        }
        Ok(())
    }

    pub fn hessian(&self, y: &[f64]) -> Result<SymCsc> {
        let mut values = vec![0.0; self.pattern.nnz()];
        self.hessian_into(y, 0.0, &mut values)?;
        Ok(self.pattern.matrix(values))
    }

    /// The fixed jump penalty as a 3n×3n matrix `B` with `R_h = yᵀBy`.
    pub fn regularization_matrix(&self) -> SymCsc {
        self.expand(&self.reg)
    }

    /// H¹ Gram matrix, mass plus stiffness for each component.
    pub fn h1_matrix(&self) -> SymCsc {
        self.expand(&self.h1)
    }

    fn expand(&self, scalar: &[f64]) -> SymCsc {
        let mut values = vec![0.0; self.pattern.nnz()];
        for (k, slots) in self.pattern.scalar_slots.iter().enumerate() {
            for &s in slots {
                values[s as usize] += scalar[k];
            }
        }
        self.pattern.matrix(values)
    }

    pub fn h1_norm_sq(&self, d: &[f64]) -> f64 {
        self.pattern.scalar_quad(&self.h1, d)
    }

    pub fn h1_apply(&self, d: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; d.len()];
        self.pattern.scalar_mul(&self.h1, d, &mut out);
        out
    }

    /// Jump `F_{T0} − F_{T1}` across interior edge `edge`.
    pub fn gradient_jump(&self, y: &[f64], edge: usize) -> Mat32 {
        let [t0, t1] = self.topology.edges[edge].elements;
        let (f0, f1) = (self.deformation_gradient(y, t0), self.deformation_gradient(y, t1));
        std::array::from_fn(|i| [f0[i][0] - f1[i][0], f0[i][1] - f1[i][1]])
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    /// Per-element entrywise l1 norm `|I[y] − g|`.
    pub fn metric_defect_field(&self, y: &[f64]) -> Vec<f64> {
        (0..self.mesh.num_elements())
            .map(|t| {
                let i = first_form(&self.deformation_gradient(y, t));
                let g = crate::material::metric_of(self.material.m[t], self.material.lambda[t]);
                crate::material::metric_distance(&i, &g)
            })
            .collect()
    }

    /// `‖I[y] − g‖_{L¹}`.
    pub fn metric_defect(&self, y: &[f64]) -> f64 {
        self.metric_defect_field(y)
            .iter()
            .zip(&self.areas)
            .map(|(d, a)| d * a)
            .sum()
    }

    pub(crate) fn pattern(&self) -> &Pattern {
        &self.pattern
    }
}

fn model_for(
    mesh: &Mesh,
    topology: &EdgeTopology,
    weights: &RegularizationWeights,
    program: &MaterialProgram,
) -> Result<EnergyModel> {
    let material = program.sample(mesh)?;
    EnergyModel::new(mesh.clone(), topology.clone(), material, weights.clone())
}

/// `∫ W_str(∇y)` over the mesh.
pub fn stretching_energy(mesh: &Mesh, deformation: &[[f64; 3]], program: &MaterialProgram) -> Result<f64> {
    let material = program.sample(mesh)?;
    let y = deformation.as_flattened();
    if y.len() != 3 * mesh.num_vertices() {
        return Err(Error::invalid("deformation does not match the mesh"));
    }
    let mut acc = 0.0;
    for t in 0..mesh.num_elements() {
        let e = mesh.elements[t];
        let g = mesh.shape_gradients(t);
        let mut f = [[0.0; 2]; 3];
        for a in 0..3 {
            for i in 0..3 {
                f[i][0] += y[3 * e[a] + i] * g[a][0];
                f[i][1] += y[3 * e[a] + i] * g[a][1];
            }
        }
        let act = Actuation::new(material.m[t], material.s[t], material.s0[t])?;
        acc += mesh.area(t) * act.density(&f).map_err(|e| tag_element(e, t))?;
    }
    Ok(acc)
}

/// `Σ_e c_r h_e² |[∇y]|²` over interior edges.
pub fn regularization_energy(
    mesh: &Mesh,
    topology: &EdgeTopology,
    weights: &RegularizationWeights,
    deformation: &[[f64; 3]],
) -> Result<f64> {
    let program = MaterialProgram::uniform(crate::material::Director::Constant([1.0, 0.0]), 0.0, 0.0)?;
    Ok(model_for(mesh, topology, weights, &program)?.regularization_energy(deformation.as_flattened()))
}

pub fn discrete_energy(
    mesh: &Mesh,
    topology: &EdgeTopology,
    weights: &RegularizationWeights,
    deformation: &[[f64; 3]],
    program: &MaterialProgram,
) -> Result<EnergyReport> {
    model_for(mesh, topology, weights, program)?.energy(deformation.as_flattened())
}

pub fn assemble_gradient(
    mesh: &Mesh,
    topology: &EdgeTopology,
    weights: &RegularizationWeights,
    deformation: &[[f64; 3]],
    program: &MaterialProgram,
) -> Result<Vec<f64>> {
    model_for(mesh, topology, weights, program)?.gradient(deformation.as_flattened())
}

pub fn assemble_hessian(
    mesh: &Mesh,
    topology: &EdgeTopology,
    weights: &RegularizationWeights,
    deformation: &[[f64; 3]],
    program: &MaterialProgram,
) -> Result<SymCsc> {
    model_for(mesh, topology, weights, program)?.hessian(deformation.as_flattened())
}

/// H¹ Gram matrix on the element-adjacency pattern.
pub fn h1_matrix(mesh: &Mesh) -> SymCsc {
    let pattern = Pattern::new(mesh, None);
    let mut values = vec![0.0; pattern.nnz()];
    for t in 0..mesh.num_elements() {
        let (e, area, g) = (mesh.elements[t], mesh.area(t), mesh.shape_gradients(t));
        for a in 0..3 {
            for b in a..3 {
                let mass = area / 12.0 * if a == b { 2.0 } else { 1.0 };
                let stiff = area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                let k = pattern.scalar_slot(e[a], e[b]);
                for &s in &pattern.scalar_slots[k] {
                    values[s as usize] += mass + stiff;
                }
            }
        }
    }
    pattern.matrix(values)
}
